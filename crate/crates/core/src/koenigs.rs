//! Conjugacy maps for composition symbols: the characteristic-1 map u
//! solving u∘φ = u + c1 (characteristic 1) or u∘φ = c0·u (characteristic
//! >= 2), plus the eigenfunctions and commuting companions built from it.
//!
//! Two construction schemes are provided. The recurrence scheme solves the
//! coefficient equations exactly (triangular); the iterative scheme runs
//! the defining fixed-point iteration and serves as an independent oracle.

pub mod spectral;

pub use spectral::{
    resolvent_apply, rotation_eigenstructure, spectrum_points, weighted_eigenfunction,
    weighted_spectrum, RotationEigenstructure, RotationSpec, SpectrumClass, SpectrumResult,
};

use crate::error::Error;
use crate::series::DirichletSeries;
use crate::symbols::{compose_symbols, invert, power_term, Symbol};
use crate::{Cplx, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Iterative,
    Recurrence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoenigsResult {
    /// Characteristic-1 conjugacy map. Normalization: constant term 0 for
    /// characteristic-1 symbols (the equation only determines u up to an
    /// additive constant), c1/(c0-1) for characteristic >= 2.
    pub u: Symbol,
    pub scheme: Scheme,
    pub residual: f64,
    pub iterations_used: usize,
}

fn check_characteristic(phi: &Symbol) -> Result<()> {
    if phi.c0() == 0 {
        return Err(Error::Characteristic {
            got: 0,
            need: "c0 >= 1",
        });
    }
    Ok(())
}

/// Exact triangular solve for the conjugacy coefficients.
///
/// Characteristic 1: d_n (1 - n^{-c1}) = c_n + sum over proper divisors
/// k of n (k >= 2) of α(k,n) d_k, where α(k,n) is the n-th coefficient of
/// k^{-φ}. Needs Re c1 > 0 so the diagonal stays away from zero.
/// Characteristic >= 2: c0·d_n = c_n + same sum; the support condition
/// k^{c0} | n makes it triangular with no diagonal term at all.
pub fn koenigs_recurrence(phi: &Symbol) -> Result<KoenigsResult> {
    check_characteristic(phi)?;
    let n = phi.trunc();
    let c0 = phi.c0();
    let c1 = phi.c1();
    if c0 == 1 && phi.is_affine() {
        // pure shift: u = s solves the equation exactly for any c1
        let u = Symbol::identity(n);
        let residual = abel_residual(&u, phi)?;
        return Ok(KoenigsResult {
            u,
            scheme: Scheme::Recurrence,
            residual,
            iterations_used: 0,
        });
    }
    if c0 == 1 && c1.re <= 0.0 {
        return Err(Error::Resonance { re_c1: c1.re });
    }

    // α(k, ·) for every k whose power term reaches the truncation
    let alpha: Vec<Option<DirichletSeries>> = (0..=n as u64)
        .map(|k| {
            if k < 2 {
                return Ok(None);
            }
            let pt = power_term(k, phi)?;
            Ok(if pt.overflow { None } else { Some(pt.series) })
        })
        .collect::<Result<_>>()?;

    let mut d = vec![Cplx::ZERO; n];
    d[0] = if c0 == 1 {
        Cplx::ZERO
    } else {
        c1 / Cplx::new(c0 as f64 - 1.0, 0.0)
    };
    for idx in 2..=n as u64 {
        let mut rhs = phi.psi().coeff(idx);
        for k in 2..idx {
            if let Some(series) = &alpha[k as usize] {
                let a = series.coeff(idx);
                if a != Cplx::ZERO {
                    rhs += d[k as usize - 1] * a;
                }
            }
        }
        d[idx as usize - 1] = if c0 == 1 {
            // diagonal term: the idx-th coefficient of idx^{-φ} is idx^{-c1}
            let diag = Cplx::ONE - (-c1 * (idx as f64).ln()).exp();
            rhs / diag
        } else {
            rhs / Cplx::new(c0 as f64, 0.0)
        };
    }
    let u = Symbol::new(1, DirichletSeries::from_coeffs(d));
    let residual = abel_residual(&u, phi)?;
    Ok(KoenigsResult {
        u,
        scheme: Scheme::Recurrence,
        residual,
        iterations_used: 0,
    })
}

/// Fixed-point construction: u ← u∘φ - c1 (characteristic 1, from u = s),
/// u ← (u∘φ)/c0 (characteristic >= 2, from u = s + c1/(c0-1); the constant
/// term is forced, so starting there removes the slow scalar mode).
pub fn koenigs_iterative(phi: &Symbol, tol: f64, max_iter: usize) -> Result<KoenigsResult> {
    check_characteristic(phi)?;
    let n = phi.trunc();
    let c0 = phi.c0();
    let c1 = phi.c1();
    if c0 == 1 && !phi.is_affine() && c1.re <= 0.0 {
        return Err(Error::Resonance { re_c1: c1.re });
    }
    let mut u = if c0 == 1 {
        Symbol::identity(n)
    } else {
        Symbol::affine(1, c1 / Cplx::new(c0 as f64 - 1.0, 0.0), n)
    };
    let mut last_change = f64::INFINITY;
    for it in 1..=max_iter {
        let composed = compose_symbols(&u, phi)?;
        let next = if c0 == 1 {
            let shift = DirichletSeries::constant(-c1, n);
            Symbol::new(1, composed.psi().add(&shift)?)
        } else {
            Symbol::new(1, composed.psi().scale(Cplx::new(1.0 / c0 as f64, 0.0)))
        };
        last_change = next.psi().max_coeff_diff(u.psi());
        u = next;
        if last_change <= tol {
            let residual = abel_residual(&u, phi)?;
            return Ok(KoenigsResult {
                u,
                scheme: Scheme::Iterative,
                residual,
                iterations_used: it,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_change,
    })
}

/// Max coefficient mismatch between u∘φ and its conjugacy target:
/// u + c1 when φ has characteristic 1, c0·u when c0 >= 2.
pub fn abel_residual(u: &Symbol, phi: &Symbol) -> Result<f64> {
    if u.c0() != 1 {
        return Err(Error::Characteristic {
            got: u.c0(),
            need: "conjugacy map with c0 = 1",
        });
    }
    let lhs = compose_symbols(u, phi)?;
    let c0 = phi.c0();
    let rhs = if c0 == 1 {
        let shift = DirichletSeries::constant(phi.c1(), u.trunc());
        Symbol::new(1, u.psi().add(&shift)?)
    } else {
        Symbol::new(c0, u.psi().scale(Cplx::new(c0 as f64, 0.0)))
    };
    Ok(lhs.max_coeff_diff(&rhs))
}

/// Eigenfunction m^{-u} of the composition operator, as a series with
/// leading index m. m = 1 gives the constant eigenfunction.
pub fn eigenfunction(m: u64, u: &Symbol) -> Result<DirichletSeries> {
    if u.c0() != 1 {
        return Err(Error::Characteristic {
            got: u.c0(),
            need: "conjugacy map with c0 = 1",
        });
    }
    if m == 0 {
        return Err(Error::Invalid("eigenfunction index must be >= 1".into()));
    }
    if m == 1 {
        return Ok(DirichletSeries::one(u.trunc()));
    }
    let pt = power_term(m, u)?;
    if pt.overflow {
        return Err(Error::TruncationOverflow {
            index: m,
            trunc: u.trunc(),
        });
    }
    Ok(pt.series)
}

fn is_power_of(c: u64, base: u64) -> bool {
    if base < 2 {
        return c == base;
    }
    let mut p = 1u64;
    loop {
        if p == c {
            return true;
        }
        p = match p.checked_mul(base) {
            Some(v) if v <= c => v,
            _ => return false,
        };
    }
}

/// Commuting companion φ̃ = u^{-1} ∘ (c·u) with characteristic c, built
/// from the conjugacy map of a characteristic >= 2 symbol. Requires c not
/// a power of c0, which is what keeps C_{φ̃} outside the closed algebra
/// generated by C_φ.
pub fn companion_symbol(phi: &Symbol, c: u64) -> Result<Symbol> {
    if phi.c0() < 2 {
        return Err(Error::Characteristic {
            got: phi.c0(),
            need: "c0 >= 2 for companion construction",
        });
    }
    if c < 2 || is_power_of(c, phi.c0()) {
        return Err(Error::ForbiddenPower {
            c,
            base: phi.c0(),
        });
    }
    let u = koenigs_recurrence(phi)?.u;
    let u_inv = invert(&u, 1e-13, 64)?;
    let cu = Symbol::new(c, u.psi().scale(Cplx::new(c as f64, 0.0)));
    compose_symbols(&u_inv, &cu)
}

/// Search n <= max_n for a certified half-plane drift: the first n with
/// image_lower_bound(φ^{[n]}, 0) > 0, together with that bound. None means
/// the coefficient bound failed to certify within the search range, not
/// that no drift exists.
pub fn drift_certificate(phi: &Symbol, max_n: usize) -> Result<Option<(usize, f64)>> {
    check_characteristic(phi)?;
    let mut it = phi.clone();
    for n in 1..=max_n {
        let delta = crate::symbols::image_lower_bound(&it, 0.0);
        if delta > 0.0 {
            return Ok(Some((n, delta)));
        }
        it = compose_symbols(&it, phi)?;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::compose;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn symbol(c0: u64, terms: &[(u64, Cplx)], trunc: usize) -> Symbol {
        let mut psi = DirichletSeries::zero(trunc);
        for &(k, v) in terms {
            psi.set_coeff(k, v).unwrap();
        }
        Symbol::new(c0, psi)
    }

    #[test]
    fn recurrence_affine_closed_forms() {
        // c0 >= 2: u = s + c1/(c0-1)
        let phi = Symbol::affine(3, c(2.0, 1.0), 32);
        let r = koenigs_recurrence(&phi).unwrap();
        assert!(r.u.max_coeff_diff(&Symbol::affine(1, c(1.0, 0.5), 32)) < 1e-14);
        assert!(r.residual < 1e-12);
        // pure shift: u = s, even with Re c1 <= 0
        let shift = Symbol::affine(1, c(-1.0, 2.0), 32);
        let r2 = koenigs_recurrence(&shift).unwrap();
        assert_eq!(r2.u, Symbol::identity(32));
        assert_eq!(r2.residual, 0.0);
    }

    #[test]
    fn recurrence_needs_positive_drift_when_characteristic_one() {
        let phi = symbol(1, &[(1, c(0.0, 1.0)), (2, c(0.5, 0.0))], 16);
        assert!(matches!(
            koenigs_recurrence(&phi),
            Err(Error::Resonance { .. })
        ));
        assert!(matches!(
            koenigs_iterative(&phi, 1e-9, 100),
            Err(Error::Resonance { .. })
        ));
    }

    #[test]
    fn iterative_affine_large_characteristic_is_immediate() {
        let phi = Symbol::affine(2, c(3.0, 0.0), 32);
        let r = koenigs_iterative(&phi, 1e-12, 50).unwrap();
        assert_eq!(r.iterations_used, 1);
        assert!(r.u.max_coeff_diff(&Symbol::affine(1, c(3.0, 0.0), 32)) < 1e-14);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn schemes_agree_on_nonlinear_symbols() {
        let cases = [
            symbol(2, &[(1, c(1.0, 0.0)), (2, c(1.0, 0.0))], 64),
            symbol(1, &[(1, c(2.0, 0.0)), (2, c(1.0, 0.0))], 64),
            symbol(
                1,
                &[(1, c(1.5, 0.5)), (2, c(0.3, -0.2)), (3, c(0.1, 0.0))],
                64,
            ),
        ];
        for phi in &cases {
            let rec = koenigs_recurrence(phi).unwrap();
            let ite = koenigs_iterative(phi, 1e-12, 2000).unwrap();
            assert!(
                rec.u.max_coeff_diff(&ite.u) < 1e-9,
                "scheme mismatch {}",
                rec.u.max_coeff_diff(&ite.u)
            );
            assert!(rec.residual < 1e-10, "recurrence residual {}", rec.residual);
            assert!(ite.residual < 1e-10, "iterative residual {}", ite.residual);
        }
    }

    #[test]
    fn abel_residual_closed_forms_and_sensitivity() {
        // u = s+1 conjugates φ = 2s+1: u∘φ = 2s+2 = 2u
        let u = Symbol::affine(1, c(1.0, 0.0), 32);
        let phi = Symbol::affine(2, c(1.0, 0.0), 32);
        assert_eq!(abel_residual(&u, &phi).unwrap(), 0.0);
        // perturbing one coefficient by ε moves the residual by ~ε
        let phi2 = symbol(1, &[(1, c(2.0, 0.0)), (2, c(1.0, 0.0))], 32);
        let u2 = koenigs_recurrence(&phi2).unwrap().u;
        for eps in [1e-3, 1e-6] {
            let mut psi = u2.psi().clone();
            psi.set_coeff(2, psi.coeff(2) + c(eps, 0.0)).unwrap();
            let r = abel_residual(&Symbol::new(1, psi), &phi2).unwrap();
            assert!(r >= eps / 2.0 && r <= 2.0 * eps, "eps={eps} r={r}");
        }
    }

    #[test]
    fn eigenfunction_relation_and_edge_cases() {
        let phi = symbol(1, &[(1, c(2.0, 0.0)), (2, c(1.0, 0.0))], 64);
        let u = koenigs_recurrence(&phi).unwrap().u;
        for m in [2u64, 3, 5] {
            let f = eigenfunction(m, &u).unwrap();
            let (lead, coeff) = f.leading_term(crate::ZERO_TOL).unwrap();
            assert_eq!(lead, m);
            assert!((coeff - Cplx::ONE).norm() < 1e-12); // constant term of u is 0
            let lhs = compose(&f, &phi).unwrap();
            let lam = (-phi.c1() * (m as f64).ln()).exp();
            let resid = lhs.sub(&f.scale(lam)).unwrap().max_coeff_diff(
                &DirichletSeries::zero(64),
            );
            assert!(resid < 1e-9, "m={m} resid={resid}");
        }
        assert_eq!(
            eigenfunction(1, &u).unwrap(),
            DirichletSeries::one(64)
        );
        assert!(matches!(
            eigenfunction(100, &Symbol::identity(64)),
            Err(Error::TruncationOverflow { index: 100, .. })
        ));
    }

    #[test]
    fn companion_affine_formula_and_power_guard() {
        let phi = Symbol::affine(2, c(1.0, 0.0), 81);
        let tilde = companion_symbol(&phi, 3).unwrap();
        assert!(tilde.max_coeff_diff(&Symbol::affine(3, c(2.0, 0.0), 81)) < 1e-12);
        assert!(matches!(
            companion_symbol(&phi, 4),
            Err(Error::ForbiddenPower { c: 4, base: 2 })
        ));
        assert!(matches!(
            companion_symbol(&Symbol::affine(1, c(1.0, 0.0), 16), 3),
            Err(Error::Characteristic { .. })
        ));
    }

    #[test]
    fn companion_commutes_with_symbol() {
        let phi = symbol(2, &[(1, c(2.0, 0.0)), (2, c(1.0, 0.0))], 81);
        let tilde = companion_symbol(&phi, 3).unwrap();
        assert_eq!(tilde.c0(), 3);
        let ab = compose_symbols(&phi, &tilde).unwrap();
        let ba = compose_symbols(&tilde, &phi).unwrap();
        assert!(ab.max_coeff_diff(&ba) < 1e-8, "{}", ab.max_coeff_diff(&ba));
    }

    #[test]
    fn drift_certificate_finds_escape() {
        // ψ-tail dominates at n=1 but iteration drifts right
        let phi = symbol(1, &[(1, c(1.0, 0.0)), (2, c(1.5, 0.0))], 64);
        assert!(crate::symbols::image_lower_bound(&phi, 0.0) < 0.0);
        let (n, delta) = drift_certificate(&phi, 20).unwrap().unwrap();
        assert!(n >= 2 && delta > 0.0, "n={n} delta={delta}");
        // certified immediately when the bound already clears at n=1
        let easy = symbol(1, &[(1, c(2.0, 0.0)), (2, c(0.5, 0.0))], 64);
        assert_eq!(drift_certificate(&easy, 20).unwrap().map(|p| p.0), Some(1));
    }

    #[test]
    fn koenigs_result_serializes_with_scheme_tag() {
        let phi = Symbol::affine(2, c(1.0, 0.0), 4);
        let r = koenigs_recurrence(&phi).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["scheme"], "recurrence");
        assert_eq!(json["iterations_used"], 0);
        assert!(json["u"]["c0"] == 1);
    }
}
