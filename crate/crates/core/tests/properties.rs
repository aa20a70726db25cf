//! Algebraic laws the truncated objects promise to satisfy, fuzzed over
//! random inputs. Everything here is exact on the truncation up to float
//! roundoff, so tolerances are tight.

use std::collections::BTreeMap;

use proptest::prelude::*;

use koenigslab_core::disc::{tcompose, texp, tlog, TaylorSeries};
use koenigslab_core::series::DirichletSeries;
use koenigslab_core::shifts::{self, WeightFamily};
use koenigslab_core::symbols::{self, Symbol};
use koenigslab_core::Cplx;

fn small_cplx() -> impl Strategy<Value = Cplx> {
    (-0.5..0.5f64, -0.5..0.5f64).prop_map(|(re, im)| Cplx::new(re, im))
}

fn dirichlet(n: usize) -> impl Strategy<Value = DirichletSeries> {
    proptest::collection::vec(small_cplx(), n).prop_map(DirichletSeries::from_coeffs)
}

fn taylor_vanishing(m: usize) -> impl Strategy<Value = TaylorSeries> {
    proptest::collection::vec(small_cplx(), m)
        .prop_map(|mut coeffs| {
            coeffs.insert(0, Cplx::ZERO);
            TaylorSeries::from_coeffs(coeffs)
        })
}

proptest! {
    #[test]
    fn dirichlet_convolution_commutes(f in dirichlet(24), g in dirichlet(24)) {
        let fg = f.dmul(&g).unwrap();
        let gf = g.dmul(&f).unwrap();
        prop_assert!(fg.max_coeff_diff(&gf) <= 1e-12);
    }

    #[test]
    fn dirichlet_convolution_associates(
        f in dirichlet(24),
        g in dirichlet(24),
        h in dirichlet(24),
    ) {
        let left = f.dmul(&g).unwrap().dmul(&h).unwrap();
        let right = f.dmul(&g.dmul(&h).unwrap()).unwrap();
        prop_assert!(left.max_coeff_diff(&right) <= 1e-12);
    }

    #[test]
    fn dirichlet_unit_is_neutral(f in dirichlet(24)) {
        let one = DirichletSeries::one(24);
        prop_assert!(f.dmul(&one).unwrap().max_coeff_diff(&f) == 0.0);
    }

    #[test]
    fn exponential_turns_sums_into_products(f in dirichlet(20), g in dirichlet(20)) {
        let sum = f.add(&g).unwrap().dexp();
        let prod = f.dexp().dmul(&g.dexp()).unwrap();
        prop_assert!(sum.max_coeff_diff(&prod) <= 1e-10);
    }

    #[test]
    fn dilation_is_multiplicative(
        f in dirichlet(32),
        g in dirichlet(32),
        k in 1u64..4,
        l in 1u64..4,
    ) {
        let left = f.dilate(k).unwrap().dmul(&g.dilate(l).unwrap()).unwrap();
        let right = f.dmul(&g).unwrap().dilate(k * l).unwrap();
        prop_assert!(left.max_coeff_diff(&right) <= 1e-12);
    }

    #[test]
    fn power_term_lands_on_base_multiples(
        k in 2u64..8,
        re_c1 in 0.1..2.0f64,
        im_c1 in -2.0..2.0f64,
        extra in small_cplx(),
        at in 2u64..8,
    ) {
        let mut psi = DirichletSeries::zero(64);
        psi.set_coeff(1, Cplx::new(re_c1, im_c1)).unwrap();
        psi.set_coeff(at, extra).unwrap();
        let phi = Symbol::new(2, psi);
        let pt = symbols::power_term(k, &phi).unwrap();
        prop_assert!(symbols::support_in_multiples(&pt.series, k * k));
        let lead = (-Cplx::new(re_c1, im_c1) * (k as f64).ln()).exp();
        if k * k <= 64 {
            prop_assert!((pt.series.coeff(k * k) - lead).norm() <= 1e-12);
        } else {
            prop_assert!(pt.overflow);
        }
    }

    #[test]
    fn inversion_round_trips(coeffs in proptest::collection::vec(small_cplx(), 3)) {
        let trunc = 16;
        let mut psi = DirichletSeries::zero(trunc);
        for (i, z) in coeffs.iter().enumerate() {
            psi.set_coeff(i as u64 + 1, z * 0.4).unwrap();
        }
        let u = Symbol::new(1, psi);
        let v = symbols::invert(&u, 1e-13, 200).unwrap();
        let round = symbols::compose_symbols(&v, &u).unwrap();
        prop_assert!(round.max_coeff_diff(&Symbol::identity(trunc)) <= 1e-9);
    }

    #[test]
    fn taylor_composition_associates(
        f in taylor_vanishing(11),
        g in taylor_vanishing(11),
        h in taylor_vanishing(11),
    ) {
        let left = tcompose(&tcompose(&f, &g).unwrap(), &h).unwrap();
        let right = tcompose(&f, &tcompose(&g, &h).unwrap()).unwrap();
        prop_assert!(left.max_coeff_diff(&right) <= 1e-9);
    }

    #[test]
    fn taylor_log_inverts_exp(g in taylor_vanishing(11)) {
        let back = tlog(&texp(&g).unwrap()).unwrap();
        prop_assert!(back.max_coeff_diff(&g) <= 1e-10);
    }
}

fn annulus(seq: &[(f64, f64)]) -> Vec<Cplx> {
    seq.iter()
        .map(|&(r, t)| Cplx::from_polar(0.5 + r, std::f64::consts::TAU * t))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn intertwiner_space_always_has_full_pattern_dimension(
        w in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 5),
        wp in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 5),
        k in 2usize..6,
    ) {
        let w = annulus(&w);
        let wp = annulus(&wp);
        let basis = shifts::intertwiner_basis(&w[..k], &wp[..k], k).unwrap();
        prop_assert_eq!(basis.dimension, k + 1);
        prop_assert!(basis.max_pattern_residual <= 1e-10);
        prop_assert!(basis.max_commute_residual <= 1e-12);
    }

    #[test]
    fn cesaro_errors_decrease_and_respect_the_pattern_norm(
        w1 in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 7),
        w2 in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 7),
        a in proptest::collection::vec(small_cplx(), 4),
    ) {
        let mut blocks = BTreeMap::new();
        blocks.insert(1, annulus(&w1));
        blocks.insert(2, annulus(&w2));
        let fam = WeightFamily::new(6, blocks).unwrap();
        let rep = shifts::cesaro_approximation(&fam, &a, 40, 1e-12).unwrap();
        prop_assert!(rep.monotone);
        prop_assert!(rep.fejer_bound_ok);
    }
}
