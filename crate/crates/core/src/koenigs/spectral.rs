//! Spectra of composition and weighted composition operators on the
//! truncated series space, plus resolvent application.
//!
//! Spectrum "computation" here means evaluating the closed-form answer the
//! theory supplies for each symbol class and enumerating its points up to a
//! bound; the resolvent and eigenfunction routines then verify those
//! answers operationally.

use crate::error::Error;
use crate::series::DirichletSeries;
use crate::symbols::{compose, Symbol};
use crate::{Cplx, Result, ZERO_TOL};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumClass {
    /// c0 >= 2: the operator is a compact-type perturbation, spectrum {0,1}.
    CharacteristicAtLeastTwo,
    /// c0 = 1 with genuine drift: spectrum {0} ∪ {m^{-c1}}.
    CharacteristicOne,
    /// φ = s + iτ: invertible, point spectrum {m^{-iτ}}.
    VerticalTranslation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub class: SpectrumClass,
    pub points: Vec<Cplx>,
}

impl Serialize for SpectrumResult {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("SpectrumResult", 2)?;
        st.serialize_field("class", &self.class)?;
        let pts: Vec<(f64, f64)> = self.points.iter().map(|z| (z.re, z.im)).collect();
        st.serialize_field("points", &pts)?;
        st.end()
    }
}

impl SpectrumResult {
    pub fn contains(&self, lambda: Cplx, tol: f64) -> bool {
        self.points.iter().any(|p| (p - lambda).norm() <= tol)
    }
}

fn push_dedup(points: &mut Vec<Cplx>, z: Cplx) {
    if !points.iter().any(|p| (p - z).norm() <= 1e-12) {
        points.push(z);
    }
}

/// Is φ a vertical translation s + iτ (up to the zero tolerance)?
pub fn is_vertical_translation(phi: &Symbol) -> bool {
    phi.c0() == 1 && phi.psi0().is_zero() && phi.c1().re.abs() <= ZERO_TOL
}

/// Spectrum of the composition operator, enumerated up to index m_max for
/// the characteristic-1 classes.
pub fn spectrum_points(phi: &Symbol, m_max: u64) -> Result<SpectrumResult> {
    if phi.c0() == 0 {
        return Err(Error::Characteristic {
            got: 0,
            need: "c0 >= 1",
        });
    }
    if is_vertical_translation(phi) {
        let tau = phi.c1().im;
        let mut points = Vec::new();
        for m in 1..=m_max.max(1) {
            // m^{-iτ} = exp(-iτ log m)
            push_dedup(&mut points, Cplx::new(0.0, -tau * (m as f64).ln()).exp());
        }
        return Ok(SpectrumResult {
            class: SpectrumClass::VerticalTranslation,
            points,
        });
    }
    if phi.c0() >= 2 {
        return Ok(SpectrumResult {
            class: SpectrumClass::CharacteristicAtLeastTwo,
            points: vec![Cplx::ZERO, Cplx::ONE],
        });
    }
    let c1 = phi.c1();
    let mut points = vec![Cplx::ZERO];
    for m in 1..=m_max.max(1) {
        push_dedup(&mut points, (-c1 * (m as f64).ln()).exp());
    }
    Ok(SpectrumResult {
        class: SpectrumClass::CharacteristicOne,
        points,
    })
}

/// How the rotation parameter τ of a vertical translation is supplied:
/// exactly, as 2kπ/log(m0/n0), or as a bare float (then coincidence
/// detection is numerical and flagged as such).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotationSpec {
    Symbolic { k: i64, m0: u64, n0: u64 },
    Numeric(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationEigenstructure {
    pub tau: f64,
    /// Indices n <= the search bound with n^{-iτ} = m^{-iτ}; the basis
    /// generators n^{-s} of the eigenspace.
    pub generators: Vec<u64>,
    /// True when membership was decided by exact integer arithmetic.
    pub exact: bool,
}

fn factorize(mut n: u64) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

fn exponent_diff(a: u64, b: u64) -> BTreeMap<u64, i64> {
    let mut v = factorize(a);
    for (p, e) in factorize(b) {
        let slot = v.entry(p).or_insert(0);
        *slot -= e;
        if *slot == 0 {
            v.remove(&p);
        }
    }
    v
}

/// Does k·δ = ℓ·w admit an integer ℓ? Returns it when so.
fn matching_multiplier(
    k: i64,
    delta: &BTreeMap<u64, i64>,
    w: &BTreeMap<u64, i64>,
) -> Option<i64> {
    if delta.is_empty() {
        return Some(0);
    }
    let (&p0, &w0) = w.iter().next()?;
    let num = k * delta.get(&p0).copied().unwrap_or(0);
    if num % w0 != 0 {
        return None;
    }
    let ell = num / w0;
    let mut primes: Vec<u64> = delta.keys().chain(w.keys()).copied().collect();
    primes.dedup();
    for p in primes {
        let lhs = k * delta.get(&p).copied().unwrap_or(0);
        let rhs = ell * w.get(&p).copied().unwrap_or(0);
        if lhs != rhs {
            return None;
        }
    }
    Some(ell)
}

/// Eigenspace generators of the vertical-translation operator at the
/// eigenvalue m^{-iτ}: all n <= n_max with n^{-iτ} = m^{-iτ}.
///
/// Symbolic τ = 2kπ/log(m0/n0) reduces membership to the integer relation
/// k·(v_n - v_m) = ℓ·(v_{m0} - v_{n0}) on prime exponent vectors, decided
/// exactly. Numeric τ tests |τ·log(n/m)| mod 2π against a fixed tolerance
/// and reports exact = false.
pub fn rotation_eigenstructure(
    spec: &RotationSpec,
    m: u64,
    n_max: u64,
) -> Result<RotationEigenstructure> {
    if m == 0 {
        return Err(Error::Invalid("eigenvalue index m must be >= 1".into()));
    }
    match *spec {
        RotationSpec::Symbolic { k, m0, n0 } => {
            if k == 0 || m0 == 0 || n0 == 0 || m0 == n0 {
                return Err(Error::Invalid(
                    "symbolic rotation needs k != 0 and m0 != n0, both >= 1".into(),
                ));
            }
            let w = exponent_diff(m0, n0);
            let tau = 2.0 * std::f64::consts::PI * k as f64 / (m0 as f64 / n0 as f64).ln();
            let mut generators = Vec::new();
            for n in 1..=n_max {
                let delta = exponent_diff(n, m);
                if matching_multiplier(k, &delta, &w).is_some() {
                    generators.push(n);
                }
            }
            Ok(RotationEigenstructure {
                tau,
                generators,
                exact: true,
            })
        }
        RotationSpec::Numeric(tau) => {
            let mut generators = Vec::new();
            for n in 1..=n_max {
                let cycles = tau * ((n as f64).ln() - (m as f64).ln())
                    / (2.0 * std::f64::consts::PI);
                if (cycles - cycles.round()).abs() <= 1e-9 {
                    generators.push(n);
                }
            }
            Ok(RotationEigenstructure {
                tau,
                generators,
                exact: false,
            })
        }
    }
}

/// Apply the resolvent (C_φ - λ)^{-1} to g:
/// F = a/(1-λ) - Σ_{n≥0} g0∘φ^{[n]} / λ^{n+1}, with a the constant term
/// of g and g0 the rest. The series is summed until its term bound drops
/// below tol/10; for c0 >= 2 it terminates exactly once the support of
/// the iterated composition escapes the truncation.
pub fn resolvent_apply(
    phi: &Symbol,
    lambda: Cplx,
    g: &DirichletSeries,
    tol: f64,
) -> Result<DirichletSeries> {
    if g.trunc() != phi.trunc() {
        return Err(Error::TruncationMismatch(g.trunc(), phi.trunc()));
    }
    let spectrum = spectrum_points(phi, g.trunc() as u64)?;
    if spectrum.contains(lambda, 1e-12) {
        return Err(Error::SpectrumPoint { lambda });
    }
    let n = g.trunc();
    let a = g.coeff(1);
    let g0 = g.without_constant();
    let mut f = DirichletSeries::constant(a / (Cplx::ONE - lambda), n);
    if g0.is_zero() {
        return Ok(f);
    }
    if phi.c0() == 1 {
        // leading-term decay ratio of the summed series
        let (m0, _) = g0.leading_term(ZERO_TOL)?;
        let ratio = (m0 as f64).powf(-phi.c1().re) / lambda.norm();
        if ratio >= 1.0 - 1e-12 {
            return Err(Error::NonConvergence {
                iterations: 0,
                last_change: ratio,
            });
        }
    }
    let mut term = g0;
    let mut lam_pow = lambda;
    let max_terms = 10_000;
    for _ in 0..max_terms {
        f = f.sub(&term.scale(Cplx::ONE / lam_pow))?;
        term = compose(&term, phi)?;
        lam_pow *= lambda;
        let bound = term.l1_norm() / lam_pow.norm();
        if term.is_zero() || bound < tol / 10.0 {
            return Ok(f);
        }
    }
    Err(Error::NonConvergence {
        iterations: max_terms,
        last_change: term.l1_norm() / lam_pow.norm(),
    })
}

/// Eigenfunction of the weighted composition operator f ↦ D·(f∘φ) at the
/// eigenvalue D(∞): the normalized product h = Π_k D(φ^{[k]})/D(∞), with
/// h(∞) = 1. Factors within tolerance of 1 terminate the product.
pub fn weighted_eigenfunction(
    d: &DirichletSeries,
    phi: &Symbol,
    tol: f64,
) -> Result<DirichletSeries> {
    if d.trunc() != phi.trunc() {
        return Err(Error::TruncationMismatch(d.trunc(), phi.trunc()));
    }
    let d_inf = d.coeff(1);
    if d_inf.norm() <= ZERO_TOL {
        return Err(Error::EmptyPointSpectrum);
    }
    let n = d.trunc();
    let one = DirichletSeries::one(n);
    let mut h = DirichletSeries::one(n);
    let mut it = Symbol::identity(n);
    let max_factors = 10_000;
    for k in 0..max_factors {
        let factor = compose(d, &it)?.scale(Cplx::ONE / d_inf);
        if factor.coeff(1).norm() <= ZERO_TOL {
            // constant terms pass through composition, so this cannot
            // trigger once d_inf != 0; kept as a guard on the invariant
            return Err(Error::ZeroFactor { index: k });
        }
        let deviation = factor.sub(&one)?.l1_norm();
        let scale = (d_inf.norm() * h.l1_norm()).max(1.0);
        if deviation * scale <= tol / 2.0 {
            return Ok(h);
        }
        h = h.dmul(&factor)?;
        it = crate::symbols::compose_symbols(&it, phi)?;
    }
    Err(Error::NonConvergence {
        iterations: max_factors,
        last_change: f64::NAN,
    })
}

/// Spectrum of the weighted composition operator f ↦ D·(f∘φ), enumerated
/// up to index m_max. D(∞) = 0 collapses the point spectrum to {0};
/// vertical translations are flagged and get no point enumeration.
pub fn weighted_spectrum(
    d: &DirichletSeries,
    phi: &Symbol,
    m_max: u64,
) -> Result<SpectrumResult> {
    if phi.c0() == 0 {
        return Err(Error::Characteristic {
            got: 0,
            need: "c0 >= 1",
        });
    }
    if is_vertical_translation(phi) {
        return Ok(SpectrumResult {
            class: SpectrumClass::VerticalTranslation,
            points: Vec::new(),
        });
    }
    let d_inf = d.coeff(1);
    if d_inf.norm() <= ZERO_TOL {
        let class = if phi.c0() >= 2 {
            SpectrumClass::CharacteristicAtLeastTwo
        } else {
            SpectrumClass::CharacteristicOne
        };
        return Ok(SpectrumResult {
            class,
            points: vec![Cplx::ZERO],
        });
    }
    if phi.c0() >= 2 {
        let mut points = vec![Cplx::ZERO];
        push_dedup(&mut points, d_inf);
        return Ok(SpectrumResult {
            class: SpectrumClass::CharacteristicAtLeastTwo,
            points,
        });
    }
    let c1 = phi.c1();
    let mut points = vec![Cplx::ZERO];
    for m in 1..=m_max.max(1) {
        push_dedup(&mut points, d_inf * (-c1 * (m as f64).ln()).exp());
    }
    Ok(SpectrumResult {
        class: SpectrumClass::CharacteristicOne,
        points,
    })
}
