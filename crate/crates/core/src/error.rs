//! Crate-wide error type. Variants name the violated contract, not the
//! call site; front ends map any of these to exit code 2.

use crate::Cplx;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("index {index} exceeds truncation {trunc}")]
    TruncationOverflow { index: u64, trunc: usize },
    #[error("no coefficient above the zero tolerance")]
    NoLeadingTerm,
    #[error("characteristic {got} unsupported here (need {need})")]
    Characteristic { got: u64, need: &'static str },
    #[error("did not converge after {iterations} iterations (last change {last_change:.3e})")]
    NonConvergence { iterations: usize, last_change: f64 },
    #[error("translation term with Re(c1) = {re_c1} resonates; the conjugacy recurrence needs Re(c1) > 0")]
    Resonance { re_c1: f64 },
    #[error("lambda = {lambda} lies in the computed spectrum")]
    SpectrumPoint { lambda: Cplx },
    #[error("order {c} is a forbidden power of {base}")]
    ForbiddenPower { c: u64, base: u64 },
    #[error("order {q} is a forbidden multiple of {base}")]
    ForbiddenMultiple { q: u64, base: u64 },
    #[error("weight symbol vanishes at infinity: the point spectrum is empty")]
    EmptyPointSpectrum,
    #[error("eigenfunction product factor {index} has vanishing constant term")]
    ZeroFactor { index: usize },
    #[error("constant term {value} must vanish")]
    ConstantTerm { value: Cplx },
    #[error("branch proxy violated: off-constant coefficient sum {coeff_sum} >= 1")]
    Branch { coeff_sum: f64 },
    #[error("leading Taylor coefficient vanishes: series is not invertible")]
    NotInvertible,
    #[error("derivative at the fixed point vanishes")]
    ZeroDerivative,
    #[error("fixed point is not attracting: |lambda| = {modulus} >= 1")]
    NotAttracting { modulus: f64 },
    #[error("vanishing order {found} does not match the stated order {expected}")]
    VanishingOrder { expected: usize, found: usize },
    #[error("weight for block {m} at position {k} is zero or not finite")]
    InvalidWeight { m: u64, k: usize },
    #[error("{0}")]
    Invalid(String),
}
