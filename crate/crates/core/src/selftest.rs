//! Deterministic end-to-end exercise of the library's numerical guarantees.
//! Eleven independent criteria, each seeded with its own fixed RNG stream so
//! every run draws the same inputs and produces byte-identical reports; the
//! final criterion verifies exactly that by running the other ten twice.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::concurrency;
use crate::criteria;
use crate::disc::{self, tcompose, TaylorSeries};
use crate::koenigs::{self, spectral};
use crate::series::DirichletSeries;
use crate::shifts::{self, ClassMode};
use crate::symbols::{self, Symbol};
use crate::{Cplx, Result};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SelftestReport {
    pub criteria: Vec<CriterionReport>,
    pub all_pass: bool,
}

fn seeded(id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6b6f656e69670000 ^ id)
}

fn report(
    id: usize,
    name: &str,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionReport {
    let (pass, detail) = match body() {
        Ok(pd) => pd,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport {
        id,
        name: name.into(),
        pass,
        detail,
    }
}

fn cplx_in(rng: &mut ChaCha8Rng, re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> Cplx {
    Cplx::new(rng.random_range(re), rng.random_range(im))
}

/// Closed-form conjugacy for affine symbols of characteristic >= 2: the
/// recurrence must return s + c1/(c0 - 1) to near machine precision.
fn affine_recurrence() -> CriterionReport {
    report(1, "affine-recurrence", || {
        let mut rng = seeded(1);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let c0 = rng.random_range(2..=6u64);
            let c1 = cplx_in(&mut rng, 1e-3..3.0, -3.0..3.0);
            let phi = Symbol::affine(c0, c1, 32);
            let got = koenigs::koenigs_recurrence(&phi)?;
            let expect = Symbol::affine(1, c1 / Cplx::new(c0 as f64 - 1.0, 0.0), 32);
            worst = worst.max(got.u.max_coeff_diff(&expect));
        }
        Ok((
            worst < 1e-14,
            format!("max coefficient error {worst:.3e} over 20 draws (tolerance 1e-14)"),
        ))
    })
}

fn random_dominated_symbol(rng: &mut ChaCha8Rng, c0: u64, trunc: usize) -> Result<Symbol> {
    let mut psi = DirichletSeries::zero(trunc);
    let mut mass = 0.0;
    for _ in 0..3 {
        let n = loop {
            let n = rng.random_range(2..=16u64);
            if psi.coeff(n).norm() == 0.0 {
                break n;
            }
        };
        let z = cplx_in(rng, -0.4..0.4, -0.4..0.4);
        psi.set_coeff(n, z)?;
        mass += z.norm();
    }
    let c1 = Cplx::new(mass + rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0));
    psi.set_coeff(1, c1)?;
    Ok(Symbol::new(c0, psi))
}

/// The direct recurrence and the fixed-point iteration must land on the same
/// conjugacy, and that conjugacy must satisfy its functional equation.
fn solver_agreement() -> CriterionReport {
    report(2, "solver-agreement", || {
        let mut rng = seeded(2);
        let mut worst_gap = 0.0f64;
        let mut worst_resid = 0.0f64;
        for i in 0..10 {
            let c0 = [1u64, 2, 3][i % 3];
            let phi = random_dominated_symbol(&mut rng, c0, 64)?;
            let rec = koenigs::koenigs_recurrence(&phi)?;
            let ite = koenigs::koenigs_iterative(&phi, 1e-13, 10_000)?;
            worst_gap = worst_gap.max(rec.u.max_coeff_diff(&ite.u));
            worst_resid = worst_resid.max(koenigs::abel_residual(&rec.u, &phi)?);
        }
        Ok((
            worst_gap <= 1e-8 && worst_resid <= 1e-10,
            format!(
                "scheme gap {worst_gap:.3e} (tol 1e-8), conjugacy residual {worst_resid:.3e} \
                 (tol 1e-10) over 10 symbols"
            ),
        ))
    })
}

/// k^(-phi) must be supported on multiples of k^c0 with leading coefficient
/// k^(-c1).
fn power_term_support() -> CriterionReport {
    report(3, "power-term-support", || {
        let mut rng = seeded(3);
        let trunc = 64usize;
        let mut worst = 0.0f64;
        let mut supported = true;
        for _ in 0..100 {
            let c0 = rng.random_range(1..=3u64);
            let k_max = match c0 {
                1 => 64,
                2 => 8,
                _ => 4,
            };
            let k = rng.random_range(2..=k_max);
            let mut psi = DirichletSeries::zero(trunc);
            for n in [rng.random_range(2..=8u64), rng.random_range(2..=8u64)] {
                psi.set_coeff(n, cplx_in(&mut rng, -0.3..0.3, -0.3..0.3))?;
            }
            let c1 = cplx_in(&mut rng, 0.1..2.0, -2.0..2.0);
            psi.set_coeff(1, c1)?;
            let phi = Symbol::new(c0, psi);
            let pt = symbols::power_term(k, &phi)?;
            let base = k.pow(c0 as u32);
            supported &= symbols::support_in_multiples(&pt.series, base);
            let lead = (-c1 * (k as f64).ln()).exp();
            worst = worst.max((pt.series.coeff(base) - lead).norm());
        }
        Ok((
            supported && worst <= 1e-12,
            format!(
                "support on k^c0 multiples: {supported}, leading coefficient error {worst:.3e} \
                 (tol 1e-12) over 100 draws"
            ),
        ))
    })
}

/// The conjugacy turns composition into scaling: for phi = s + 2 + 2^(-s),
/// composing the transported basis vector m^(-u) must multiply it by m^(-2).
fn eigenfunction_transport() -> CriterionReport {
    report(4, "eigenfunction-transport", || {
        let trunc = 64;
        let mut psi = DirichletSeries::zero(trunc);
        psi.set_coeff(1, Cplx::new(2.0, 0.0))?;
        psi.set_coeff(2, Cplx::ONE)?;
        let phi = Symbol::new(1, psi);
        let u = koenigs::koenigs_recurrence(&phi)?.u;
        let mut worst = 0.0f64;
        for m in [2u64, 3, 5] {
            let e = koenigs::eigenfunction(m, &u)?;
            let lhs = symbols::compose(&e, &phi)?;
            let rhs = e.scale(Cplx::new((m as f64).powi(-2), 0.0));
            worst = worst.max(lhs.max_coeff_diff(&rhs));
        }
        Ok((
            worst <= 1e-8,
            format!("max eigen-relation error {worst:.3e} over m in {{2, 3, 5}} (tol 1e-8)"),
        ))
    })
}

/// Companion symbols: the affine case closes in exact arithmetic, and the
/// perturbed case commutes with the original symbol under composition.
fn companion_commutation() -> CriterionReport {
    report(5, "companion-commutation", || {
        let affine = Symbol::affine(2, Cplx::ONE, 16);
        let psi3 = koenigs::companion_symbol(&affine, 3)?;
        let exact = psi3.c0() == 3
            && psi3.max_coeff_diff(&Symbol::affine(3, Cplx::new(2.0, 0.0), 16)) == 0.0;

        let trunc = 81;
        let mut psi = DirichletSeries::zero(trunc);
        psi.set_coeff(1, Cplx::new(2.0, 0.0))?;
        psi.set_coeff(2, Cplx::ONE)?;
        let phi = Symbol::new(2, psi);
        let comp = koenigs::companion_symbol(&phi, 3)?;
        let fwd = symbols::compose_symbols(&phi, &comp)?;
        let bwd = symbols::compose_symbols(&comp, &phi)?;
        let resid = fwd.max_coeff_diff(&bwd);
        Ok((
            exact && resid <= 1e-8,
            format!(
                "affine companion exact: {exact}, commutation residual {resid:.3e} at \
                 truncation 81 (tol 1e-8)"
            ),
        ))
    })
}

/// The resolvent must actually invert: (C_phi - lambda) applied to the
/// resolvent image reproduces the input series.
fn resolvent_identity() -> CriterionReport {
    report(6, "resolvent-identity", || {
        let mut rng = seeded(6);
        let trunc = 64;
        let phi = Symbol::affine(2, Cplx::ONE, trunc);
        let lambdas = [
            Cplx::new(2.0, 0.0),
            Cplx::new(-1.0, 0.0),
            Cplx::new(0.5, 0.5),
        ];
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let mut g = DirichletSeries::zero(trunc);
            for n in 1..=trunc as u64 {
                g.set_coeff(n, cplx_in(&mut rng, -1.0..1.0, -1.0..1.0))?;
            }
            for &lambda in &lambdas {
                let f = spectral::resolvent_apply(&phi, lambda, &g, 1e-12)?;
                let back = symbols::compose(&f, &phi)?.sub(&f.scale(lambda))?;
                worst = worst.max(back.max_coeff_diff(&g));
            }
        }
        Ok((
            worst <= 1e-8,
            format!("max inversion error {worst:.3e} over 15 resolvent applications (tol 1e-8)"),
        ))
    })
}

/// Fixed verdicts on the boundary cases of the cyclicity and commutant
/// criteria, including the disc-side self-map route.
fn criteria_verdicts() -> CriterionReport {
    report(7, "criteria-verdicts", || {
        let mut failures = Vec::new();
        if !criteria::example76_check(2.5, 0.5).is_pass() {
            failures.push("two-block gate (2.5, 0.5) should pass");
        }
        if !criteria::example48_check(1.0, Cplx::new(0.2, 0.0)).is_pass() {
            failures.push("two-term bound at 0.2 should pass");
        }
        if !criteria::example48_check(1.0, Cplx::new(0.25, 0.0)).is_fail() {
            failures.push("two-term bound at 0.25 should fail");
        }
        let tau = Cplx::new(0.0, std::f64::consts::TAU / 2f64.ln());
        if !criteria::cyclicity_affine(tau, 64, 1e-9).is_fail() {
            failures.push("resonant vertical translation should fail cyclicity");
        }
        let mut half_z = TaylorSeries::zero(16);
        half_z.set_coeff(1, Cplx::new(0.5, 0.0))?;
        let third = Cplx::new(1.0 / 3.0, 0.0);
        if !disc::cor89_check(third, &half_z)?.is_pass() {
            failures.push("attracting self-map route at (1/3, z/2) should pass");
        }
        Ok((
            failures.is_empty(),
            if failures.is_empty() {
                "5 fixed verdicts correct".into()
            } else {
                failures.join("; ")
            },
        ))
    })
}

/// Superattracting conjugacies on the disc: monomials conjugate to the
/// identity exactly, a perturbed quadratic satisfies its functional
/// equation, and the norm certificate accepts a known-good map.
fn disc_conjugacies() -> CriterionReport {
    report(8, "disc-conjugacies", || {
        let m = 32;
        let mut monomials_exact = true;
        for p in [2u32, 3] {
            let phi = TaylorSeries::monomial(p as usize, m)?;
            let u = disc::boettcher(&phi, p, Cplx::ONE, 1e-12, 64)?;
            monomials_exact &= u.max_coeff_diff(&TaylorSeries::identity(m)) == 0.0;
        }

        let quarter = Cplx::new(0.25, 0.0);
        let mut phi = TaylorSeries::zero(m);
        phi.set_coeff(2, quarter)?;
        phi.set_coeff(3, quarter * quarter)?;
        let u = disc::boettcher(&phi, 2, quarter, 1e-14, 200)?;
        let normalized = (u.coeff(1) - Cplx::ONE).norm() == 0.0;
        let resid = tcompose(&u, &phi)?.max_coeff_diff(&u.pow(2).scale(quarter));

        let half = Cplx::new(0.5, 0.0);
        let mut good = TaylorSeries::zero(m);
        good.set_coeff(2, half)?;
        good.set_coeff(4, half * half)?;
        let cert = disc::boettcher_norm_check(&good, 2, half)?;
        Ok((
            monomials_exact && normalized && resid <= 1e-10 && cert.is_pass(),
            format!(
                "monomial conjugacies exact: {monomials_exact}, normalized: {normalized}, \
                 functional-equation residual {resid:.3e} (tol 1e-10), norm certificate \
                 pass: {}",
                cert.is_pass()
            ),
        ))
    })
}

/// Weighted-shift structure of a characteristic-2 symbol: patterned
/// commutant, single shared pattern in the filtered double commutant, one
/// equivalence class, and the alternating two-sided drift splitting into
/// two classes.
fn shift_commutant_structure() -> CriterionReport {
    report(9, "shift-commutant-structure", || {
        let fam = shifts::canonical_family(2, Cplx::ONE, 5, 8)?;
        let comm = shifts::commutant_blocks(&fam)?;
        let double = shifts::double_commutant_structure(&fam, 5)?;
        let classes = shifts::equivalence_classes(&fam, ClassMode::ClosedForm)?;
        let holds = classes.classes.len() == 1
            && classes.verdict.is_pass()
            && classes.verdict.detail.as_deref() == Some("double commutant property holds");
        let alt = shifts::equivalence_classes(&shifts::alternating_example(63), ClassMode::FiniteHorizon)?;
        let splits = alt.classes.len() == 2 && alt.verdict.is_fail();
        Ok((
            comm.all_patterned
                && double.dimension == 9
                && double.single_shared_pattern
                && holds
                && splits,
            format!(
                "commutant patterned: {} (residual {:.3e}), filtered double commutant \
                 dimension {} shared: {}, single class: {holds}, alternating drift splits: \
                 {splits}",
                comm.all_patterned,
                comm.pairs
                    .iter()
                    .map(|p| p.pattern_residual)
                    .fold(0.0, f64::max),
                double.dimension,
                double.single_shared_pattern
            ),
        ))
    })
}

/// Cesaro means of the shift polynomial: norm bounds hold and the means
/// converge to the pattern operator on every basis vector.
fn cesaro_approximation() -> CriterionReport {
    report(10, "cesaro-approximation", || {
        let mut rng = seeded(10);
        let fam = shifts::canonical_family(2, Cplx::ONE, 3, 8)?;
        let a: Vec<Cplx> = (0..3)
            .map(|_| cplx_in(&mut rng, -7e-5..7e-5, -7e-5..7e-5))
            .collect();
        let rep = shifts::cesaro_approximation(&fam, &a, 200, 1e-6)?;
        Ok((
            rep.shift_bound_ok && rep.fejer_bound_ok && rep.monotone && rep.converged,
            format!(
                "mean-norm bounds: shift {} / pattern {}, monotone: {}, final error {:.3e} \
                 (tol 1e-6)",
                rep.shift_bound_ok, rep.fejer_bound_ok, rep.monotone, rep.final_error
            ),
        ))
    })
}

fn numbered(id: usize) -> CriterionReport {
    match id {
        1 => affine_recurrence(),
        2 => solver_agreement(),
        3 => power_term_support(),
        4 => eigenfunction_transport(),
        5 => companion_commutation(),
        6 => resolvent_identity(),
        7 => criteria_verdicts(),
        8 => disc_conjugacies(),
        9 => shift_commutant_structure(),
        10 => cesaro_approximation(),
        _ => unreachable!("criterion ids run 1..=10"),
    }
}

/// One full pass over criteria 1..=10, fanned out across the worker pool.
pub fn run_criteria() -> Vec<CriterionReport> {
    concurrency::run_indexed(10, |i| numbered(i + 1))
}

/// All eleven criteria; the eleventh runs the first ten a second time and
/// demands byte-identical JSON.
pub fn run_selftest() -> SelftestReport {
    let first = run_criteria();
    let second = run_criteria();
    let b1 = serde_json::to_vec(&first).expect("reports serialize");
    let b2 = serde_json::to_vec(&second).expect("reports serialize");
    let identical = b1 == b2;
    let mut criteria = first;
    criteria.push(CriterionReport {
        id: 11,
        name: "selftest-determinism".into(),
        pass: identical,
        detail: format!(
            "two runs serialized to {} bytes, byte-identical: {identical}",
            b1.len()
        ),
    });
    let all_pass = criteria.iter().all(|c| c.pass);
    SelftestReport { criteria, all_pass }
}
