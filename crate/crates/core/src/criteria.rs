//! Decision predicates: cyclicity gates and certificates, diagonal and
//! multiplier commutant checks, and the quantitative sufficient conditions
//! for a minimal commutant.
//!
//! Each checker evaluates a closed-form or search condition on exactly
//! truncated data. PASS/FAIL are only emitted when the condition is
//! decidable from that data; a sufficient condition that fails to certify
//! yields UNDETERMINED, never FAIL.

use crate::error::Error;
use crate::koenigs::companion_symbol;
use crate::series::DirichletSeries;
use crate::symbols::{compose, derivative_bound, image_lower_bound, Symbol};
use crate::verdict::Verdict;
use crate::{Cplx, Result, ZERO_TOL};

/// -log(log 2)/(1 + log 2): the closed-form ceiling on |c_2| in the
/// two-term cyclicity example.
pub fn two_term_cyclicity_constant() -> f64 {
    -(2f64.ln().ln()) / (1.0 + 2f64.ln())
}

/// Necessary condition for cyclicity: the characteristic must be 1.
/// A characteristic >= 2 operator has both 2^{-s} and 3^{-s} orthogonal to
/// its range, and c0 = 0 symbols are never univalent far enough right.
pub fn cyclicity_gate(phi: &Symbol) -> Verdict {
    if phi.c0() == 1 {
        return Verdict::undetermined("cyclicity_gate")
            .with_detail("gate passed: characteristic 1 is necessary, not sufficient");
    }
    let witness = if phi.c0() >= 2 {
        serde_json::json!({"orthogonal_to_range": [2, 3]})
    } else {
        serde_json::json!({"reason": "characteristic 0 symbols are not univalent"})
    };
    Verdict::fail("cyclicity_gate")
        .with_q("c0", phi.c0() as f64)
        .with_witness(witness)
}

/// Cyclicity of the pure translation s + c1: cyclic exactly when no two
/// eigenvalues m^{-c1} coincide, i.e. c1 avoids the lattice
/// i·2kπ/log(m/n). Positive drift passes outright; purely imaginary c1 is
/// searched over m, n <= n_max and flagged "up to search bound".
pub fn cyclicity_affine(c1: Cplx, n_max: u64, tol: f64) -> Verdict {
    let check = "cyclicity_affine";
    if c1.re > ZERO_TOL {
        return Verdict::pass(check)
            .with_q("re_c1", c1.re)
            .with_detail("eigenvalue moduli are strictly decreasing");
    }
    if c1.re < -ZERO_TOL {
        return Verdict::undetermined(check)
            .with_q("re_c1", c1.re)
            .with_detail("negative drift is outside the translation class");
    }
    if c1.norm() <= tol {
        // all eigenvalues collapse to 1
        return Verdict::fail(check)
            .with_witness(serde_json::json!({"m": 2, "n": 1, "k": 0}))
            .with_detail("zero translation: every eigenvalue equals 1");
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    // m > n covers both orders: swapping the pair only negates k
    for m in 2..=n_max {
        for n in 1..m {
            let log_ratio = (m as f64 / n as f64).ln();
            let k_near = (c1.im * log_ratio / two_pi).round();
            for k in [k_near - 1.0, k_near, k_near + 1.0] {
                if k == 0.0 {
                    continue;
                }
                let target = Cplx::new(0.0, two_pi * k / log_ratio);
                if (c1 - target).norm() < tol {
                    return Verdict::fail(check)
                        .with_q("tau", target.im)
                        .with_witness(serde_json::json!({
                            "m": m, "n": n, "k": k as i64
                        }))
                        .with_detail(format!("{m}^(-c1) = {n}^(-c1): duplicate eigenvalue"));
                }
            }
        }
    }
    Verdict::pass(check)
        .with_q("search_bound", n_max as f64)
        .with_detail("no eigenvalue coincidence up to search bound")
}

/// One-sided bound sum Σ_{k>=2} |c_k| k^{-σ}.
fn coefficient_tail(phi: &Symbol, sigma: f64) -> f64 {
    let psi0 = phi.psi0();
    (2..=phi.trunc() as u64)
        .map(|k| psi0.coeff(k).norm() * (k as f64).powf(-sigma))
        .sum()
}

/// Dense-range certificate by half-plane sandwich: search a < 0 with
///   (1) Σ|c_k|(log k)k^{-a} <= 1           (univalence on Re s > a),
///   (2) σ = Re c1 - Σ|c_k| > 0             (image of Re s > 0 shifted right),
///   (3) U(a) = a + Re c1 + Σ|c_k|k^{-a} < σ (covering a strip from Re s > a).
/// PASS returns a certified triple (a, σ', σ); failure of the search is
/// UNDETERMINED since the bounds are sufficient only.
pub fn dense_range_box(phi: &Symbol) -> Verdict {
    let check = "dense_range_box";
    if phi.c0() != 1 {
        return Verdict::not_applicable(check).with_q("c0", phi.c0() as f64);
    }
    let sigma = image_lower_bound(phi, 0.0);
    if sigma <= 0.0 {
        return Verdict::undetermined(check)
            .with_q("sigma", sigma)
            .with_detail("image bound does not clear the boundary line");
    }
    // the closed-form optimum of the two-term example first, then a grid
    let a0 = 2f64.ln().ln() / 2f64.ln();
    let candidates = std::iter::once(a0).chain((1..=400).map(|j| -0.015 * j as f64));
    let mut best: Option<(f64, f64)> = None;
    for a in candidates {
        if derivative_bound(phi, a) > 1.0 {
            continue;
        }
        let upper = a + phi.c1().re + coefficient_tail(phi, a);
        let margin = sigma - upper;
        if margin > 0.0 && best.map_or(true, |(_, m)| margin > m) {
            best = Some((a, margin));
        }
    }
    match best {
        Some((a, margin)) => {
            let upper = sigma - margin;
            let sigma_prime = 0.5 * (upper.max(0.0) + sigma);
            Verdict::pass(check)
                .with_q("a", a)
                .with_q("sigma", sigma)
                .with_q("sigma_prime", sigma_prime)
                .with_q("margin", margin)
                .with_witness(serde_json::json!({
                    "a": a, "sigma_prime": sigma_prime, "sigma": sigma
                }))
        }
        None => Verdict::undetermined(check)
            .with_q("sigma", sigma)
            .with_detail("no half-plane satisfies all three bounds (search over a in [-6, 0))"),
    }
}

/// Closed-form cyclicity test for φ = s + c1 + c2·2^{-s} with real drift:
/// PASS iff |c2| < -log log 2/(1+log 2) and |c2| < c1.
pub fn example48_check(c1: f64, c2: Cplx) -> Verdict {
    let check = "two_term_cyclicity";
    let ceiling = two_term_cyclicity_constant();
    let c2_mod = c2.norm();
    let v = Verdict::new(
        check,
        if c2_mod < ceiling && c2_mod < c1 {
            crate::Status::Pass
        } else {
            crate::Status::Fail
        },
    )
    .with_q("c2_mod", c2_mod)
    .with_q("ceiling", ceiling)
    .with_q("drift", c1);
    if c2_mod >= ceiling {
        v.with_detail("|c2| reaches the closed-form ceiling")
    } else if c2_mod >= c1 {
        v.with_detail("|c2| reaches the drift")
    } else {
        v
    }
}

/// Caller-supplied asymptotic behaviour of a diagonal's eigenvalue
/// sequence; not decidable from a finite prefix, so it is an input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticTag {
    ConvergentTo(Cplx),
    OnCircle { center: Cplx, radius: f64 },
    None,
}

/// Minimal commutant for a diagonal operator: duplicates in the symbol
/// sequence destroy it; an injective sequence that converges, or lies on
/// a circle, has it. Anything else is out of reach of the finite data.
pub fn diag_minimal_commutant(lambdas: &[Cplx], tag: &AsymptoticTag, tol: f64) -> Verdict {
    let check = "diag_minimal_commutant";
    for i in 0..lambdas.len() {
        for j in (i + 1)..lambdas.len() {
            if (lambdas[i] - lambdas[j]).norm() <= tol {
                return Verdict::fail(check)
                    .with_witness(serde_json::json!({"i": i, "j": j}))
                    .with_q("gap", (lambdas[i] - lambdas[j]).norm())
                    .with_detail("duplicate eigenvalue: commutant is not commutative");
            }
        }
    }
    match *tag {
        AsymptoticTag::ConvergentTo(limit) => Verdict::pass(check)
            .with_q("limit", limit)
            .with_detail("injective and convergent"),
        AsymptoticTag::OnCircle { center, radius } => {
            let max_dev = lambdas
                .iter()
                .map(|z| ((z - center).norm() - radius).abs())
                .fold(0.0, f64::max);
            if max_dev <= tol {
                Verdict::pass(check)
                    .with_q("center", center)
                    .with_q("radius", radius)
                    .with_q("max_deviation", max_dev)
                    .with_detail("injective and contained in a circle")
            } else {
                Verdict::undetermined(check)
                    .with_q("max_deviation", max_dev)
                    .with_detail("circle tag contradicted by the finite prefix")
            }
        }
        AsymptoticTag::None => Verdict::undetermined(check)
            .with_detail("injective prefix without asymptotic information"),
    }
}

/// Does the multiplication operator by b commute with composition by φ?
/// Exactly when b∘φ = b; checked coefficientwise at the truncation.
pub fn multiplier_commutes(b: &DirichletSeries, phi: &Symbol, tol: f64) -> Result<Verdict> {
    let residual = compose(b, phi)?.sub(b)?.l1_norm();
    let v = Verdict::new(
        "multiplier_commutes",
        if residual <= tol {
            crate::Status::Pass
        } else {
            crate::Status::Fail
        },
    )
    .with_q("residual", residual);
    Ok(v)
}

/// Non-constant multiplier commuting with the vertical translation by
/// τ = 2kπ/log m0: the series m0^{-(ℓ/k)s}, realizable on integer
/// frequencies exactly when k divides ℓ with positive quotient.
pub fn rotation_witness(k: i64, ell: i64, m0: u64, trunc: usize) -> Result<DirichletSeries> {
    if k == 0 || m0 < 2 {
        return Err(Error::Invalid(
            "rotation witness needs k != 0 and m0 >= 2".into(),
        ));
    }
    if ell % k != 0 || ell / k <= 0 {
        return Err(Error::Invalid(format!(
            "exponent {ell}/{k} is not a positive integer; witness leaves the integer lattice"
        )));
    }
    let j = (ell / k) as u32;
    let index = m0
        .checked_pow(j)
        .filter(|&n| n <= trunc as u64)
        .ok_or(Error::TruncationOverflow {
            index: m0.saturating_pow(j),
            trunc,
        })?;
    DirichletSeries::basis(index, trunc)
}

/// Quantitative sufficient condition for a minimal commutant, for
/// characteristic-1 symbols with genuinely positive drift:
/// g = Re c1 - Σ|c_k| > 0, M_n = Σ|c_k|(log k)k^{-ng}, and
/// 1 - Π(1+M_n)·ΣM_n > 0. The products/sums are finite plus a geometric
/// tail bound, so PASS is a certified strict inequality; anything short of
/// that is UNDETERMINED.
pub fn minimal_commutant_sufficient(phi: &Symbol, n_terms: usize) -> Verdict {
    let check = "minimal_commutant_sufficient";
    if phi.c0() != 1 {
        return Verdict::not_applicable(check).with_q("c0", phi.c0() as f64);
    }
    if phi.is_affine() {
        return Verdict::not_applicable(check)
            .with_detail("translation part only; the condition addresses non-constant tails");
    }
    let gain = image_lower_bound(phi, 0.0);
    if gain <= 0.0 {
        return Verdict::undetermined(check)
            .with_q("gain", gain)
            .with_detail("failed to certify: per-step half-plane gain is not positive");
    }
    // M_{n+1} <= M_n·2^{-g}, so a geometric bound covers the cut tail
    let ratio = 2f64.powf(-gain);
    let mut sum = 0.0;
    let mut log_product = 0.0;
    let mut m_n = f64::INFINITY;
    let mut converged = false;
    for n in 0..n_terms {
        m_n = derivative_bound(phi, n as f64 * gain);
        sum += m_n;
        log_product += m_n.ln_1p();
        if m_n < 1e-16 {
            converged = true;
            break;
        }
    }
    if !converged {
        let tail = m_n * ratio / (1.0 - ratio);
        sum += tail;
        log_product += tail;
        if tail > 1e-12 {
            return Verdict::undetermined(check)
                .with_q("gain", gain)
                .with_q("tail_bound", tail)
                .with_detail("term budget exhausted before the series settled");
        }
    }
    let margin = 1.0 - log_product.exp() * sum;
    let v = Verdict::new(
        check,
        if margin > 0.0 {
            crate::Status::Pass
        } else {
            crate::Status::Undetermined
        },
    )
    .with_q("gain", gain)
    .with_q("series_sum", sum)
    .with_q("product", log_product.exp())
    .with_q("margin", margin);
    if margin > 0.0 {
        v
    } else {
        v.with_detail("failed to certify: product bound does not clear zero")
    }
}

/// Closed-form instance of the sufficient condition for
/// φ = s + a + b·2^{-s}: PASS iff a > |b| and x·e^x < 1 with
/// x = |b|·log 2/(1 - 2^{-a+|b|}).
pub fn example76_check(a: f64, b_mod: f64) -> Verdict {
    let check = "two_term_minimal_commutant";
    if a <= b_mod {
        return Verdict::fail(check)
            .with_q("drift", a)
            .with_q("b_mod", b_mod)
            .with_detail("needs drift strictly above the tail modulus");
    }
    let x = b_mod * 2f64.ln() / (1.0 - 2f64.powf(-a + b_mod));
    let value = x * x.exp();
    let v = Verdict::new(
        check,
        if value < 1.0 {
            crate::Status::Pass
        } else {
            crate::Status::Fail
        },
    )
    .with_q("x", x)
    .with_q("x_exp_x", value);
    if value < 1.0 {
        v
    } else {
        v.with_detail("x·exp(x) reaches 1")
    }
}

/// Minimal-commutant verdict for characteristic >= 2: when the symbol
/// certifiably maps the right half-plane strictly inside itself, the
/// commuting companion of characteristic c (smallest c that is not a power
/// of c0) witnesses failure of the minimal commutant.
pub fn char2_commutant_verdict(phi: &Symbol) -> Result<Verdict> {
    let check = "char2_commutant";
    if phi.c0() <= 1 {
        return Ok(Verdict::not_applicable(check).with_q("c0", phi.c0() as f64));
    }
    let bound = image_lower_bound(phi, 0.0);
    if bound <= 0.0 {
        return Ok(Verdict::undetermined(check)
            .with_q("image_lower_bound", bound)
            .with_detail("strict half-plane contraction not certified by coefficients"));
    }
    let c = if phi.c0() == 2 { 3 } else { 2 };
    let companion = companion_symbol(phi, c)?;
    Ok(Verdict::fail(check)
        .with_q("image_lower_bound", bound)
        .with_q("companion_characteristic", c as f64)
        .with_witness(serde_json::to_value(&companion).expect("symbol serializes"))
        .with_detail("commuting companion lies outside the closed generated algebra"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Status;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn two_term(c1: f64, c2: f64, trunc: usize) -> Symbol {
        let mut psi = DirichletSeries::zero(trunc);
        psi.set_coeff(1, c(c1, 0.0)).unwrap();
        psi.set_coeff(2, c(c2, 0.0)).unwrap();
        Symbol::new(1, psi)
    }

    #[test]
    fn gate_fails_off_characteristic_one() {
        assert_eq!(
            cyclicity_gate(&Symbol::affine(2, c(1.0, 0.0), 8)).status,
            Status::Fail
        );
        assert_eq!(
            cyclicity_gate(&Symbol::affine(0, c(1.0, 0.0), 8)).status,
            Status::Fail
        );
        assert_eq!(
            cyclicity_gate(&Symbol::affine(1, c(1.0, 0.0), 8)).status,
            Status::Undetermined
        );
    }

    #[test]
    fn affine_cyclicity_lattice() {
        assert_eq!(cyclicity_affine(c(1.0, 0.0), 50, 1e-9).status, Status::Pass);
        let tau = 2.0 * std::f64::consts::PI / 2f64.ln();
        let v = cyclicity_affine(c(0.0, tau), 50, 1e-9);
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witness.as_ref().unwrap()["m"], 2);
        assert_eq!(v.witness.as_ref().unwrap()["k"], 1);
        let generic = cyclicity_affine(c(0.0, 1.0), 50, 1e-9);
        assert_eq!(generic.status, Status::Pass);
        assert!(generic.detail.as_ref().unwrap().contains("search bound"));
        assert_eq!(cyclicity_affine(Cplx::ZERO, 50, 1e-9).status, Status::Fail);
    }

    #[test]
    fn dense_range_box_verdicts() {
        // comfortably inside the closed-form region
        let v = dense_range_box(&two_term(1.0, 0.2, 32));
        assert_eq!(v.status, Status::Pass);
        let a = v.q_real("a").unwrap();
        let sp = v.q_real("sigma_prime").unwrap();
        let s = v.q_real("sigma").unwrap();
        assert!(a < 0.0 && 0.0 < sp && sp < s, "a={a} sp={sp} s={s}");
        // drift equal to the tail: sandwich collapses
        assert_eq!(
            dense_range_box(&two_term(1.0, 1.0, 32)).status,
            Status::Undetermined
        );
        // large tail: no admissible a exists even with room in the drift
        assert_eq!(
            dense_range_box(&two_term(2.5, 0.5, 32)).status,
            Status::Undetermined
        );
        // affine symbols pass trivially
        assert_eq!(
            dense_range_box(&Symbol::affine(1, c(1.0, 0.0), 16)).status,
            Status::Pass
        );
        assert_eq!(
            dense_range_box(&Symbol::affine(2, c(1.0, 0.0), 16)).status,
            Status::NotApplicable
        );
    }

    #[test]
    fn two_term_cyclicity_closed_form() {
        assert_eq!(example48_check(1.0, c(0.2, 0.0)).status, Status::Pass);
        assert_eq!(example48_check(1.0, c(0.25, 0.0)).status, Status::Fail);
        assert_eq!(example48_check(0.1, c(0.15, 0.0)).status, Status::Fail);
        let ceiling = two_term_cyclicity_constant();
        assert!(ceiling > 0.216 && ceiling < 0.217, "{ceiling}");
    }

    #[test]
    fn two_term_cyclicity_implies_box() {
        // the closed-form condition instantiates the sandwich bounds
        for &(c1, c2) in &[(1.0, 0.2), (0.5, 0.1), (2.0, 0.21), (0.22, 0.21)] {
            if example48_check(c1, c(c2, 0.0)).status == Status::Pass {
                let v = dense_range_box(&two_term(c1, c2, 32));
                assert_eq!(v.status, Status::Pass, "({c1},{c2})");
            }
        }
    }

    #[test]
    fn diagonal_commutant_cases() {
        let conv: Vec<Cplx> = (1..=10).map(|n| c((n as f64).powi(-2), 0.0)).collect();
        assert_eq!(
            diag_minimal_commutant(&conv, &AsymptoticTag::ConvergentTo(Cplx::ZERO), 1e-9).status,
            Status::Pass
        );
        let mut dup = conv.clone();
        dup[6] = dup[2];
        let v = diag_minimal_commutant(&dup, &AsymptoticTag::ConvergentTo(Cplx::ZERO), 1e-9);
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witness.as_ref().unwrap()["i"], 2);
        let circle: Vec<Cplx> = (1..=10)
            .map(|n| Cplx::new(0.0, -(n as f64).ln()).exp())
            .collect();
        assert_eq!(
            diag_minimal_commutant(
                &circle,
                &AsymptoticTag::OnCircle {
                    center: Cplx::ZERO,
                    radius: 1.0
                },
                1e-9
            )
            .status,
            Status::Pass
        );
        // permutation invariance
        let mut rev = conv.clone();
        rev.reverse();
        assert_eq!(
            diag_minimal_commutant(&rev, &AsymptoticTag::None, 1e-9).status,
            diag_minimal_commutant(&conv, &AsymptoticTag::None, 1e-9).status
        );
    }

    #[test]
    fn multiplier_fixed_points_of_vertical_translation() {
        let tau = 2.0 * std::f64::consts::PI / 2f64.ln();
        let phi = Symbol::affine(1, c(0.0, tau), 32);
        let constant = DirichletSeries::constant(c(2.0, -1.0), 32);
        assert_eq!(
            multiplier_commutes(&constant, &phi, 1e-9).unwrap().status,
            Status::Pass
        );
        let b2 = rotation_witness(1, 1, 2, 32).unwrap();
        assert_eq!(b2, DirichletSeries::basis(2, 32).unwrap());
        assert_eq!(
            multiplier_commutes(&b2, &phi, 1e-9).unwrap().status,
            Status::Pass
        );
        let b3 = DirichletSeries::basis(3, 32).unwrap();
        assert_eq!(
            multiplier_commutes(&b3, &phi, 1e-9).unwrap().status,
            Status::Fail
        );
        // products of commuting multipliers still commute
        let prod = b2.dmul(&b2).unwrap();
        assert_eq!(
            multiplier_commutes(&prod, &phi, 1e-9).unwrap().status,
            Status::Pass
        );
        assert!(rotation_witness(2, 3, 2, 32).is_err());
        assert!(rotation_witness(1, 9, 2, 32).is_err()); // 2^9 past truncation
    }

    #[test]
    fn sufficient_condition_certifies_and_abstains() {
        let good = minimal_commutant_sufficient(&two_term(2.5, 0.5, 32), 200);
        assert_eq!(good.status, Status::Pass);
        assert!((good.q_real("gain").unwrap() - 2.0).abs() < 1e-15);
        assert!((good.q_real("series_sum").unwrap() - 0.46210).abs() < 1e-4);

        let flat = minimal_commutant_sufficient(&two_term(1.0, 1.0, 32), 200);
        assert_eq!(flat.status, Status::Undetermined);
        assert!(flat.detail.as_ref().unwrap().contains("gain"));

        assert_eq!(
            minimal_commutant_sufficient(&Symbol::affine(1, c(1.0, 0.0), 16), 200).status,
            Status::NotApplicable
        );
        // monotone: shrinking the tail never flips PASS to UNDETERMINED
        for scale in [0.5, 0.1, 0.01] {
            let v = minimal_commutant_sufficient(&two_term(2.5, 0.5 * scale, 32), 200);
            assert_eq!(v.status, Status::Pass, "scale={scale}");
        }
    }

    #[test]
    fn two_term_minimal_commutant_closed_form() {
        let v = example76_check(2.5, 0.5);
        assert_eq!(v.status, Status::Pass);
        assert!((v.q_real("x").unwrap() - 0.46210).abs() < 1e-4);
        assert!((v.q_real("x_exp_x").unwrap() - 0.73355).abs() < 1e-4);
        assert_eq!(example76_check(1.0, 1.0).status, Status::Fail);
        assert_eq!(example76_check(2.0, 0.9).status, Status::Fail);
    }

    #[test]
    fn char2_verdicts_with_companion_witness() {
        let mut psi = DirichletSeries::zero(81);
        psi.set_coeff(1, c(2.0, 0.0)).unwrap();
        psi.set_coeff(2, c(1.0, 0.0)).unwrap();
        let phi = Symbol::new(2, psi);
        let v = char2_commutant_verdict(&phi).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.q_real("companion_characteristic"), Some(3.0));
        assert_eq!(v.witness.as_ref().unwrap()["c0"], 3);

        let affine = Symbol::affine(2, c(1.0, 0.0), 81);
        let v2 = char2_commutant_verdict(&affine).unwrap();
        assert_eq!(v2.status, Status::Fail);
        // witness is exactly 3s+2
        let w: Symbol = serde_json::from_value(v2.witness.clone().unwrap()).unwrap();
        assert!(w.max_coeff_diff(&Symbol::affine(3, c(2.0, 0.0), 81)) < 1e-12);

        assert_eq!(
            char2_commutant_verdict(&Symbol::affine(2, c(0.0, 1.0), 16))
                .unwrap()
                .status,
            Status::Undetermined
        );
        assert_eq!(
            char2_commutant_verdict(&Symbol::affine(1, c(1.0, 0.0), 16))
                .unwrap()
                .status,
            Status::NotApplicable
        );
    }
}
