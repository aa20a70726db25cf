//! Unit-disc side: conjugacies for self-maps with a superattracting or
//! attracting fixed point at 0, companion symbols built through them, and
//! the boundary checks (starlikeness, norm certificates) that feed the
//! commutant verdicts.
//!
//! Inputs are truncated Taylor polynomials and are treated as exact; every
//! certificate states what it certifies about those polynomials. PASS and
//! FAIL are only issued when decidable from coefficient data, otherwise the
//! verdict is UNDETERMINED.

pub mod taylor;

pub use taylor::{fractional_power, reversion, tcompose, texp, tlog, TaylorSeries};

use crate::error::Error;
use crate::verdict::{Status, Verdict};
use crate::{Cplx, Result, ZERO_TOL};

/// n-fold self-composition; n = 0 gives the identity map.
pub fn iterate(phi: &TaylorSeries, n: usize) -> Result<TaylorSeries> {
    let mut acc = TaylorSeries::identity(phi.trunc().max(1));
    for _ in 0..n {
        acc = tcompose(&acc, phi)?;
    }
    Ok(acc)
}

/// Splits phi = lambda z^p (1 + tail) and returns the unit-normalized
/// factor 1 + tail. Shared validation for the superattracting routines.
fn unit_factor(phi: &TaylorSeries, p: u32, lambda: Cplx) -> Result<TaylorSeries> {
    if p < 2 {
        return Err(Error::Invalid(format!(
            "vanishing order must be at least 2, got {p}"
        )));
    }
    if lambda.norm() <= ZERO_TOL {
        return Err(Error::Invalid(
            "leading coefficient lambda must be nonzero".into(),
        ));
    }
    let m = phi.trunc();
    let p = p as usize;
    for j in 0..p {
        if phi.coeff(j).norm() > ZERO_TOL {
            return Err(Error::VanishingOrder {
                expected: p,
                found: j,
            });
        }
    }
    if (phi.coeff(p) - lambda).norm() > 1e-9 {
        return Err(Error::Invalid(format!(
            "coefficient of z^{p} is {}, expected lambda = {lambda}",
            phi.coeff(p)
        )));
    }
    let mut psi = TaylorSeries::zero(m);
    for j in 0..=m.saturating_sub(p) {
        psi.set_coeff(j, phi.coeff(p + j) / lambda)?;
    }
    psi.set_coeff(0, Cplx::new(1.0, 0.0))?;
    Ok(psi)
}

/// Conjugacy u with u∘phi = lambda·u^p for phi = lambda z^p (1 + tail),
/// built as the product u = z · prod_k (1 + tail)^{1/p^{k+1}} ∘ phi^{[k]}.
///
/// u_0 = 0 and u_1 = 1 hold exactly. The product stops once the next
/// factor deviates from 1 by at most tol; because phi^{[k]} vanishes to
/// order p^k, this happens after about log_p(M) factors and the result is
/// the exact truncation of the conjugacy of the input polynomial.
pub fn boettcher(
    phi: &TaylorSeries,
    p: u32,
    lambda: Cplx,
    tol: f64,
    max_iter: usize,
) -> Result<TaylorSeries> {
    let psi = unit_factor(phi, p, lambda)?;
    let tail = psi.l1_tail();
    if tail > 1.0 {
        return Err(Error::Branch { coeff_sum: tail });
    }
    let m = phi.trunc();
    let lg = tlog(&psi)?;
    let one = TaylorSeries::one(m);
    let mut u = TaylorSeries::identity(m);
    let mut iter = TaylorSeries::identity(m);
    let mut denom = p as f64;
    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let frac = texp(&lg.scale(Cplx::new(1.0 / denom, 0.0)))?;
        let factor = tcompose(&frac, &iter)?;
        u = u.mul(&factor)?;
        let dev = factor.max_coeff_diff(&one);
        iter = tcompose(&iter, phi)?;
        denom *= p as f64;
        if dev <= tol || iter.is_zero() {
            return Ok(u);
        }
        last = dev;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_change: last,
    })
}

/// Certificate that |lambda|·B^{p-1} < 1 for a bound B on the conjugacy
/// sup-norm, the hypothesis under which the induced operator provably
/// fails to have a minimal commutant.
///
/// B is the smaller of the coefficient sum of the computed conjugacy and
/// the normalized-factor bound (sum |1 + tail| coefficients)^{1/(p-1)}.
/// A pure monomial lambda z^p with |lambda| <= 1 passes outright (its
/// conjugacy is z on the whole disc), and when the coefficient bounds are
/// inconclusive an iterate sup-norm below 1 still certifies the strict
/// inequality; iterate sup-norms are bounded by the recursion
/// B_{n+1} = sum |phi_j| B_n^j from B_0 = 1, never from truncated iterate
/// coefficients (whose sum undercounts the dropped tail). Anything else
/// stays UNDETERMINED.
pub fn boettcher_norm_check(phi: &TaylorSeries, p: u32, lambda: Cplx) -> Result<Verdict> {
    let check = "boettcher_norm";
    let psi = unit_factor(phi, p, lambda)?;
    let tail = psi.l1_tail();

    if tail <= ZERO_TOL {
        return Ok(if lambda.norm() <= 1.0 + ZERO_TOL {
            Verdict::pass(check)
                .with_q("lambda_mod", lambda.norm())
                .with_q("bound", 1.0)
                .with_detail("monomial symbol: the conjugacy is z on the full disc")
        } else {
            Verdict::undetermined(check)
                .with_q("lambda_mod", lambda.norm())
                .with_detail("monomial with |lambda| > 1 is not a self-map of the disc")
        });
    }
    if tail > 1.0 {
        return Ok(Verdict::undetermined(check)
            .with_q("psi_tail", tail)
            .with_detail(
                "nonvanishing of the normalized factor is not certified by coefficient sums",
            ));
    }

    let u = boettcher(phi, p, lambda, 1e-13, 10_000)?;
    let bound_u = u.l1_norm();
    let bound_psi = (1.0 + tail).powf(1.0 / (p as f64 - 1.0));
    let b = bound_u.min(bound_psi);
    let product = lambda.norm() * b.powi(p as i32 - 1);
    let verdict = Verdict::undetermined(check)
        .with_q("lambda_mod", lambda.norm())
        .with_q("bound_u", bound_u)
        .with_q("bound_psi", bound_psi)
        .with_q("product", product);
    if product < 1.0 {
        let route = if bound_u <= bound_psi { "conjugacy coefficients" } else { "normalized factor" };
        return Ok(verdict
            .with_status(Status::Pass)
            .with_detail(format!("certified via {route} bound")));
    }
    let mut bound = 1.0f64; // sup of the identity on the closed disc
    for n in 1..=8usize {
        bound = phi
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm() * bound.powi(j as i32))
            .sum();
        if bound < 1.0 {
            return Ok(verdict
                .with_status(Status::Pass)
                .with_q("iterate_bound", bound)
                .with_witness(serde_json::json!({ "route": "iterate", "n": n }))
                .with_detail(format!(
                    "iterate {n} has certified sup-norm {bound:.6} < 1, forcing the strict inequality"
                )));
        }
        if !bound.is_finite() || bound > 1e6 {
            break;
        }
    }
    Ok(verdict.with_detail("sufficient condition not certified from coefficient data"))
}

/// Companion symbol of vanishing order q for phi = lambda z^p (1 + tail):
/// conjugating mu z^q back through the superattracting coordinate, with
/// mu = lambda^{(q-1)/(p-1)} on the principal branch. The result commutes
/// with phi under composition. q must not be a multiple of p, so that the
/// companion is genuinely new rather than an iterate.
pub fn disc_companion(phi: &TaylorSeries, p: u32, lambda: Cplx, q: u32) -> Result<TaylorSeries> {
    if q < 2 {
        return Err(Error::Invalid(format!(
            "companion order must be at least 2, got {q}"
        )));
    }
    if q % p == 0 {
        return Err(Error::ForbiddenMultiple {
            q: q as u64,
            base: p as u64,
        });
    }
    let u = boettcher(phi, p, lambda, 1e-13, 10_000)?;
    let v = reversion(&u)?;
    let exponent = (q as f64 - 1.0) / (p as f64 - 1.0);
    let mu = lambda.powf(exponent);
    let target = u.pow(q).scale(mu);
    let tilde = tcompose(&v, &target)?;
    for j in 0..q as usize {
        if tilde.coeff(j).norm() > ZERO_TOL {
            return Err(Error::VanishingOrder {
                expected: q as usize,
                found: j,
            });
        }
    }
    Ok(tilde)
}

/// Attracting-fixed-point conjugacy: u with u∘phi = lambda·u, u(0) = 0,
/// u'(0) = 1, for phi(0) = 0 and 0 < |phi'(0)| < 1, via the normalized
/// iterate limit u = lim phi^{[n]} / lambda^n.
pub fn koenigs_disc(phi: &TaylorSeries, tol: f64, max_iter: usize) -> Result<TaylorSeries> {
    if phi.coeff(0).norm() > ZERO_TOL {
        return Err(Error::ConstantTerm {
            value: phi.coeff(0),
        });
    }
    let lambda = phi.coeff(1);
    if lambda.norm() <= ZERO_TOL {
        return Err(Error::ZeroDerivative);
    }
    if lambda.norm() >= 1.0 {
        return Err(Error::NotAttracting {
            modulus: lambda.norm(),
        });
    }
    let mut u = TaylorSeries::identity(phi.trunc().max(1));
    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let comp = tcompose(&u, phi)?;
        let residual = comp.max_coeff_diff(&u.scale(lambda));
        if residual <= tol {
            return Ok(u);
        }
        last = residual;
        u = comp.scale(1.0 / lambda);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_change: last,
    })
}

/// Samples Re(z·u'(z)/u(z)) at equispaced points of the unit circle.
///
/// The input polynomial is exact, so the only error is evaluation
/// roundoff; the error bar is a conservative machine-scale bound on it.
/// PASS certifies the sampled minimum is positive (the image of the disc
/// is starlike about 0 as far as the samples can see), FAIL certifies a
/// decidably negative sample, and a denominator within the error bar of
/// zero makes the check inconclusive.
pub fn starlike_check(u: &TaylorSeries, samples: usize) -> Result<Verdict> {
    let check = "starlike";
    if samples == 0 {
        return Err(Error::Invalid("need at least one boundary sample".into()));
    }
    if u.coeff(0).norm() > ZERO_TOL {
        return Err(Error::ConstantTerm { value: u.coeff(0) });
    }
    if u.coeff(1).norm() <= ZERO_TOL {
        return Err(Error::NotInvertible);
    }
    let m = u.trunc();
    // z·u'(z) has coefficient j·u_j at degree j
    let mut num = TaylorSeries::zero(m);
    for j in 1..=m {
        num.set_coeff(j, u.coeff(j) * j as f64)?;
    }
    let eps = 1e-13;
    let bar_num = eps * (m as f64 + 1.0) * num.l1_norm();
    let bar_den = eps * (m as f64 + 1.0) * u.l1_norm();

    let mut min_re = f64::INFINITY;
    let mut min_bar = 0.0;
    let mut min_theta = 0.0;
    for t in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * t as f64 / samples as f64;
        let z = Cplx::new(0.0, theta).exp();
        let dv = u.evaluate(z);
        if dv.norm() <= bar_den {
            return Ok(Verdict::undetermined(check)
                .with_q("theta", theta)
                .with_q("denominator_mod", dv.norm())
                .with_detail("boundary value of u within the error bar of zero"));
        }
        let nv = num.evaluate(z);
        let f = nv / dv;
        let bar = (bar_num + f.norm() * bar_den) / (dv.norm() - bar_den);
        if f.re < min_re {
            min_re = f.re;
            min_bar = bar;
            min_theta = theta;
        }
    }
    let verdict = Verdict::undetermined(check)
        .with_q("min_re", min_re)
        .with_q("errorbar", min_bar)
        .with_q("theta_min", min_theta)
        .with_detail(format!("{samples} boundary samples"));
    Ok(if min_re - min_bar > 0.0 {
        verdict.with_status(Status::Pass)
    } else if min_re + min_bar < 0.0 {
        verdict.with_status(Status::Fail)
    } else {
        verdict
    })
}

/// Minimal-commutant certificate for phi(z) = lambda·z·(1 + psi(z)) with
/// psi(0) = 0, from coefficient sums alone.
///
/// The general route certifies univalence (sum (j+1)|psi_j| < 1), the
/// self-map property (|lambda|(1 + sum|psi_j|) < 1), a derivative bound
/// below 1, and the product bound
/// (sum j|psi_j| / (1 - sum|psi_j|)) · 1/(1 - derivative bound) < 1.
/// When psi = a·z with a, lambda positive real, the sup-norms involved
/// are exact and the sharper condition lambda·a(1+2a)/(1-a) < 1 applies
/// (with a <= 1/2 for univalence). FAIL is reserved for symbols that
/// decidably fail to map the disc into itself; everything else that the
/// sufficient conditions miss stays UNDETERMINED.
pub fn cor89_check(lambda: Cplx, psi: &TaylorSeries) -> Result<Verdict> {
    let check = "product_commutant";
    if psi.coeff(0).norm() > ZERO_TOL {
        return Err(Error::ConstantTerm {
            value: psi.coeff(0),
        });
    }
    let s = psi.l1_tail();
    if s >= 1.0 {
        return Err(Error::Branch { coeff_sum: s });
    }
    let m = psi.trunc();
    let mut s1 = 0.0; // sum j |psi_j|
    let mut s2 = 0.0; // sum (j+1) |psi_j|
    for j in 1..=m {
        let a = psi.coeff(j).norm();
        s1 += j as f64 * a;
        s2 += (j as f64 + 1.0) * a;
    }
    let lm = lambda.norm();
    let deriv_bound = lm * (1.0 + s2);
    let selfmap_bound = lm * (1.0 + s);
    let quotient_bound = s1 / (1.0 - s);

    let verdict = Verdict::undetermined(check)
        .with_q("selfmap_bound", selfmap_bound)
        .with_q("deriv_bound", deriv_bound)
        .with_q("quotient_bound", quotient_bound);

    // exact self-map test when every coefficient is nonnegative real:
    // the sup-norm is attained at z = 1 and equals the bound
    let nonneg = lambda.im.abs() <= ZERO_TOL
        && lambda.re > 0.0
        && (1..=m).all(|j| {
            let a = psi.coeff(j);
            a.im.abs() <= ZERO_TOL && a.re >= -ZERO_TOL
        });
    if nonneg && selfmap_bound > 1.0 + ZERO_TOL {
        return Ok(verdict
            .with_status(Status::Fail)
            .with_detail("not a self-map: the sup-norm equals the coefficient sum and exceeds 1"));
    }

    if s2 < 1.0 && selfmap_bound < 1.0 && deriv_bound < 1.0 {
        let product = quotient_bound / (1.0 - deriv_bound);
        if product < 1.0 {
            return Ok(verdict
                .with_status(Status::Pass)
                .with_q("product", product)
                .with_detail("certified via the general product bound"));
        }
    }

    // psi = a·z with a, lambda positive real: sup-norms are exact and the
    // geometric series over iterates can be summed in closed form
    let monomial = nonneg && s > ZERO_TOL && (2..=m).all(|j| psi.coeff(j).norm() <= ZERO_TOL);
    if monomial {
        let a = psi.coeff(1).re;
        let sharp = lambda.re * a * (1.0 + 2.0 * a) / (1.0 - a);
        if a <= 0.5 + ZERO_TOL && selfmap_bound < 1.0 && sharp < 1.0 {
            return Ok(verdict
                .with_status(Status::Pass)
                .with_q("product", sharp)
                .with_detail("certified via the exact single-term bound"));
        }
    }

    Ok(verdict.with_detail("sufficient conditions not certified from coefficient data"))
}
