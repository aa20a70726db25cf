//! Shared result type for criteria checks. A `Verdict` carries a status,
//! the named quantities the decision was based on, and an optional
//! machine-readable witness.
//!
//! Invariant: PASS and FAIL are emitted only when the conclusion is
//! decidable from truncated data. A sufficient condition that fails to
//! certify is UNDETERMINED, not FAIL.

use crate::Cplx;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NOT_APPLICABLE")]
    NotApplicable,
    #[serde(rename = "UNDETERMINED")]
    Undetermined,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "NOT_APPLICABLE",
            Status::Undetermined => "UNDETERMINED",
        };
        f.write_str(s)
    }
}

/// Scalar quantity attached to a verdict. Reals serialize as bare numbers,
/// complex values as {"re": .., "im": ..}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    Real(f64),
    Complex(Cplx),
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Quantity::Real(x) => ser.serialize_f64(*x),
            Quantity::Complex(z) => {
                let mut m = ser.serialize_map(Some(2))?;
                m.serialize_entry("re", &z.re)?;
                m.serialize_entry("im", &z.im)?;
                m.end()
            }
        }
    }
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Real(x)
    }
}

impl From<Cplx> for Quantity {
    fn from(z: Cplx) -> Self {
        Quantity::Complex(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    /// Named scalars the decision was based on; BTreeMap keeps the JSON
    /// key order deterministic.
    pub quantities: BTreeMap<String, Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn new(check: impl Into<String>, status: Status) -> Self {
        Verdict {
            check: check.into(),
            status,
            quantities: BTreeMap::new(),
            witness: None,
            detail: None,
        }
    }

    pub fn pass(check: impl Into<String>) -> Self {
        Verdict::new(check, Status::Pass)
    }

    pub fn fail(check: impl Into<String>) -> Self {
        Verdict::new(check, Status::Fail)
    }

    pub fn not_applicable(check: impl Into<String>) -> Self {
        Verdict::new(check, Status::NotApplicable)
    }

    pub fn undetermined(check: impl Into<String>) -> Self {
        Verdict::new(check, Status::Undetermined)
    }

    /// Replaces the status; useful when the quantities are assembled
    /// before the decision is made.
    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn with_q(mut self, name: impl Into<String>, value: impl Into<Quantity>) -> Self {
        self.quantities.insert(name.into(), value.into());
        self
    }

    pub fn with_witness(mut self, witness: serde_json::Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn q(&self, name: &str) -> Option<Quantity> {
        self.quantities.get(name).copied()
    }

    pub fn q_real(&self, name: &str) -> Option<f64> {
        match self.quantities.get(name) {
            Some(Quantity::Real(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.status)?;
        if !self.quantities.is_empty() {
            let parts: Vec<String> = self
                .quantities
                .iter()
                .map(|(k, v)| match v {
                    Quantity::Real(x) => format!("{k}={x:.6}"),
                    Quantity::Complex(z) => format!("{k}={:.6}{:+.6}i", z.re, z.im),
                })
                .collect();
            write!(f, " [{}]", parts.join(", "))?;
        }
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}
