//! Truncated Taylor series sum b_j z^j, j = 0..M, with composition,
//! exp/log recurrences, fractional powers, and series reversion.
//!
//! Composition only accepts inner series vanishing at 0; under that
//! restriction every operation here is exact to the shared truncation
//! order (the dropped tail cannot reach degrees <= M).

use crate::error::Error;
use crate::{Cplx, Result, ZERO_TOL};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    /// coeffs[j] is the coefficient of z^j; len = trunc + 1.
    coeffs: Vec<Cplx>,
}

impl TaylorSeries {
    /// All-zero series with degrees 0..=trunc.
    pub fn zero(trunc: usize) -> Self {
        TaylorSeries {
            coeffs: vec![Cplx::ZERO; trunc + 1],
        }
    }

    /// The constant series 1.
    pub fn one(trunc: usize) -> Self {
        Self::constant(Cplx::new(1.0, 0.0), trunc)
    }

    pub fn constant(a: Cplx, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = a;
        s
    }

    /// The monomial z^j.
    pub fn monomial(j: usize, trunc: usize) -> Result<Self> {
        let mut s = Self::zero(trunc);
        s.set_coeff(j, Cplx::new(1.0, 0.0))?;
        Ok(s)
    }

    /// The identity map z.
    pub fn identity(trunc: usize) -> Self {
        assert!(trunc >= 1, "identity needs truncation at least 1");
        Self::monomial(1, trunc).unwrap()
    }

    pub fn from_coeffs(coeffs: Vec<Cplx>) -> Self {
        assert!(!coeffs.is_empty(), "need at least the constant coefficient");
        TaylorSeries { coeffs }
    }

    /// Top retained degree M.
    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    /// Coefficient of z^j; zero beyond the truncation.
    pub fn coeff(&self, j: usize) -> Cplx {
        self.coeffs.get(j).copied().unwrap_or(Cplx::ZERO)
    }

    pub fn set_coeff(&mut self, j: usize, value: Cplx) -> Result<()> {
        if j >= self.coeffs.len() {
            return Err(Error::TruncationOverflow {
                index: j as u64,
                trunc: self.trunc(),
            });
        }
        self.coeffs[j] = value;
        Ok(())
    }

    fn same_trunc(&self, other: &Self) -> Result<usize> {
        if self.trunc() != other.trunc() {
            return Err(Error::TruncationMismatch(self.trunc(), other.trunc()));
        }
        Ok(self.trunc())
    }

    /// Restriction to a lower truncation (or zero-padding to a higher one).
    pub fn resized(&self, trunc: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(trunc + 1, Cplx::ZERO);
        TaylorSeries { coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_trunc(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(TaylorSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_trunc(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(TaylorSeries { coeffs })
    }

    pub fn scale(&self, a: Cplx) -> Self {
        TaylorSeries {
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    /// Cauchy product truncated at the shared order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let m = self.same_trunc(other)?;
        let mut out = vec![Cplx::ZERO; m + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Cplx::ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(m + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(TaylorSeries { coeffs: out })
    }

    /// k-th power by repeated multiplication; k = 0 gives 1.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.trunc());
        for _ in 0..k {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    /// d/dz, kept at the same truncation (the top slot becomes zero).
    pub fn derivative(&self) -> Self {
        let m = self.trunc();
        let mut out = vec![Cplx::ZERO; m + 1];
        for j in 1..=m {
            out[j - 1] = self.coeffs[j] * j as f64;
        }
        TaylorSeries { coeffs: out }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn evaluate(&self, z: Cplx) -> Cplx {
        let mut acc = Cplx::ZERO;
        for a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    /// sum of |b_j|: bounds |f| on the closed unit disc.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).sum()
    }

    /// sum of |b_j| over j >= 1.
    pub fn l1_tail(&self) -> f64 {
        self.coeffs.iter().skip(1).map(|a| a.norm()).sum()
    }

    /// Largest coefficient modulus of the difference.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let m = self.trunc().max(other.trunc());
        (0..=m)
            .map(|j| (self.coeff(j) - other.coeff(j)).norm())
            .fold(0.0, f64::max)
    }

    /// True when every coefficient is at or below the shared zero tolerance.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.norm() <= ZERO_TOL)
    }
}

impl std::fmt::Display for TaylorSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.norm() <= ZERO_TOL {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            if j == 0 {
                write!(f, "({a})")?;
            } else {
                write!(f, "({a})·z^{j}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Composition f∘g, exact to the shared truncation because g(0) = 0.
pub fn tcompose(f: &TaylorSeries, g: &TaylorSeries) -> Result<TaylorSeries> {
    let m = f.same_trunc(g)?;
    if g.coeff(0).norm() > ZERO_TOL {
        return Err(Error::ConstantTerm { value: g.coeff(0) });
    }
    let mut acc = TaylorSeries::constant(f.coeff(m), m);
    for j in (0..m).rev() {
        acc = acc.mul(g)?;
        acc.coeffs[0] += f.coeff(j);
    }
    Ok(acc)
}

/// exp(g) for g with vanishing constant term, via the derivative
/// recurrence j·E_j = sum_{k=1..j} k g_k E_{j-k}.
pub fn texp(g: &TaylorSeries) -> Result<TaylorSeries> {
    if g.coeff(0).norm() > ZERO_TOL {
        return Err(Error::ConstantTerm { value: g.coeff(0) });
    }
    let m = g.trunc();
    let mut out = vec![Cplx::ZERO; m + 1];
    out[0] = Cplx::new(1.0, 0.0);
    for j in 1..=m {
        let mut acc = Cplx::ZERO;
        for k in 1..=j {
            acc += g.coeffs[k] * k as f64 * out[j - k];
        }
        out[j] = acc / j as f64;
    }
    Ok(TaylorSeries { coeffs: out })
}

/// log(f) for f with constant term 1, via the same recurrence run
/// backwards: L_j = f_j - (1/j) sum_{k=1..j-1} k L_k f_{j-k}.
pub fn tlog(f: &TaylorSeries) -> Result<TaylorSeries> {
    if (f.coeff(0) - Cplx::new(1.0, 0.0)).norm() > ZERO_TOL {
        return Err(Error::Invalid(format!(
            "logarithm needs unit constant term, got {}",
            f.coeff(0)
        )));
    }
    let m = f.trunc();
    let mut out = vec![Cplx::ZERO; m + 1];
    for j in 1..=m {
        let mut acc = Cplx::ZERO;
        for k in 1..j {
            acc += out[k] * k as f64 * f.coeffs[j - k];
        }
        out[j] = f.coeffs[j] - acc / j as f64;
    }
    Ok(TaylorSeries { coeffs: out })
}

/// Principal p-th root exp(log(f)/p) of a series with constant term 1.
///
/// Nonvanishing on the open disc is certified by the conservative proxy
/// sum_{j>=1} |f_j| <= 1 (then |f(z)| >= 1 - sum |f_j||z|^j > 0 for
/// |z| < 1), which also pins the principal branch.
pub fn fractional_power(f: &TaylorSeries, p: u32) -> Result<TaylorSeries> {
    if p == 0 {
        return Err(Error::Invalid("root order must be at least 1".into()));
    }
    if (f.coeff(0) - Cplx::new(1.0, 0.0)).norm() > ZERO_TOL {
        return Err(Error::Invalid(format!(
            "fractional power needs unit constant term, got {}",
            f.coeff(0)
        )));
    }
    let tail = f.l1_tail();
    if tail > 1.0 {
        return Err(Error::Branch { coeff_sum: tail });
    }
    let lg = tlog(f)?;
    texp(&lg.scale(Cplx::new(1.0 / p as f64, 0.0)))
}

/// Compositional inverse of u = u_1 z + ...: returns v with
/// u∘v = v∘u = z to the truncation. Solved degree by degree; the
/// degree-j coefficient of u(v) is u_1 v_j plus terms already fixed.
pub fn reversion(u: &TaylorSeries) -> Result<TaylorSeries> {
    if u.coeff(0).norm() > ZERO_TOL {
        return Err(Error::ConstantTerm { value: u.coeff(0) });
    }
    let u1 = u.coeff(1);
    if u1.norm() <= ZERO_TOL {
        return Err(Error::NotInvertible);
    }
    let m = u.trunc();
    let mut v = TaylorSeries::zero(m);
    v.coeffs[1] = 1.0 / u1;
    for j in 2..=m {
        let residue = tcompose(u, &v)?.coeff(j);
        v.coeffs[j] = -residue / u1;
    }
    Ok(v)
}

/// Wire format: {"trunc": M, "coeffs": [[j, re, im], ...]}, zeros omitted,
/// degrees strictly increasing.
#[derive(Serialize, Deserialize)]
struct TaylorRepr {
    trunc: usize,
    coeffs: Vec<(usize, f64, f64)>,
}

impl Serialize for TaylorSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Cplx::ZERO)
            .map(|(j, a)| (j, a.re, a.im))
            .collect();
        TaylorRepr {
            trunc: self.trunc(),
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TaylorSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = TaylorRepr::deserialize(deserializer)?;
        let mut out = TaylorSeries::zero(repr.trunc);
        let mut seen: Option<usize> = None;
        for (j, re, im) in repr.coeffs {
            if j > repr.trunc {
                return Err(D::Error::custom(format!(
                    "degree {j} outside 0..={}",
                    repr.trunc
                )));
            }
            if seen.is_some_and(|s| j <= s) {
                return Err(D::Error::custom(format!(
                    "degree {j} repeated or out of order"
                )));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(D::Error::custom(format!("non-finite coefficient at degree {j}")));
            }
            seen = Some(j);
            out.coeffs[j] = Cplx::new(re, im);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn pseudo_random(trunc: usize, seed: u64, amplitude: f64) -> TaylorSeries {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let coeffs = (0..=trunc).map(|_| c(next(), next()) * amplitude).collect();
        TaylorSeries::from_coeffs(coeffs)
    }

    #[test]
    fn compose_with_identity_is_identity() {
        let f = pseudo_random(12, 7, 1.0);
        let z = TaylorSeries::identity(12);
        assert!(tcompose(&f, &z).unwrap().max_coeff_diff(&f) < 1e-15);
    }

    #[test]
    fn compose_matches_hand_expansion() {
        // z² ∘ (z + z²) = z² + 2z³ + z⁴
        let f = TaylorSeries::monomial(2, 4).unwrap();
        let mut g = TaylorSeries::identity(4);
        g.set_coeff(2, c(1.0, 0.0)).unwrap();
        let h = tcompose(&f, &g).unwrap();
        let mut want = TaylorSeries::monomial(2, 4).unwrap();
        want.set_coeff(3, c(2.0, 0.0)).unwrap();
        want.set_coeff(4, c(1.0, 0.0)).unwrap();
        assert!(h.max_coeff_diff(&want) < 1e-15);
    }

    #[test]
    fn compose_is_associative() {
        let f = pseudo_random(16, 99, 0.8);
        let mut g = pseudo_random(16, 100, 0.5);
        let mut h = pseudo_random(16, 101, 0.5);
        g.set_coeff(0, Cplx::ZERO).unwrap();
        h.set_coeff(0, Cplx::ZERO).unwrap();
        let left = tcompose(&tcompose(&f, &g).unwrap(), &h).unwrap();
        let right = tcompose(&f, &tcompose(&g, &h).unwrap()).unwrap();
        assert!(left.max_coeff_diff(&right) < 1e-9);
    }

    #[test]
    fn compose_rejects_constant_inner_term() {
        let f = TaylorSeries::one(4);
        let g = TaylorSeries::constant(c(0.5, 0.0), 4);
        assert!(matches!(
            tcompose(&f, &g),
            Err(Error::ConstantTerm { .. })
        ));
    }

    #[test]
    fn exp_log_round_trip_and_known_series() {
        // log(1 + z) = z - z²/2 + z³/3 - ...
        let mut f = TaylorSeries::one(10);
        f.set_coeff(1, c(1.0, 0.0)).unwrap();
        let lg = tlog(&f).unwrap();
        for j in 1..=10usize {
            let want = if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64;
            assert!((lg.coeff(j) - c(want, 0.0)).norm() < 1e-14, "degree {j}");
        }
        let back = texp(&lg).unwrap();
        assert!(back.max_coeff_diff(&f) < 1e-14);

        let mut g = pseudo_random(20, 5, 0.4);
        g.set_coeff(0, Cplx::ZERO).unwrap();
        let round = tlog(&texp(&g).unwrap()).unwrap();
        assert!(round.max_coeff_diff(&g) < 1e-12);
    }

    #[test]
    fn square_root_matches_binomial_series() {
        // (1 + z)^{1/2} = 1 + z/2 - z²/8 + z³/16 - 5z⁴/128 + ...
        let mut f = TaylorSeries::one(4);
        f.set_coeff(1, c(1.0, 0.0)).unwrap();
        let g = fractional_power(&f, 2).unwrap();
        let want = [1.0, 0.5, -0.125, 0.0625, -5.0 / 128.0];
        for (j, w) in want.iter().enumerate() {
            assert!((g.coeff(j) - c(*w, 0.0)).norm() < 1e-14, "degree {j}");
        }
    }

    #[test]
    fn fractional_power_round_trip() {
        let mut f = pseudo_random(24, 31, 0.02);
        f.set_coeff(0, c(1.0, 0.0)).unwrap();
        for p in [2u32, 3, 5] {
            let g = fractional_power(&f, p).unwrap();
            assert!(g.pow(p).max_coeff_diff(&f) < 1e-12, "root order {p}");
        }
    }

    #[test]
    fn fractional_power_rejects_uncertified_branch() {
        let mut f = TaylorSeries::one(4);
        f.set_coeff(1, c(0.8, 0.0)).unwrap();
        f.set_coeff(2, c(0.4, 0.0)).unwrap();
        match fractional_power(&f, 2) {
            Err(Error::Branch { coeff_sum }) => assert!((coeff_sum - 1.2).abs() < 1e-15),
            other => panic!("expected branch error, got {other:?}"),
        }
    }

    #[test]
    fn reversion_matches_lagrange_inversion() {
        // inverse of z + z² is w - w² + 2w³ - 5w⁴ + ...
        let mut u = TaylorSeries::identity(4);
        u.set_coeff(2, c(1.0, 0.0)).unwrap();
        let v = reversion(&u).unwrap();
        let want = [0.0, 1.0, -1.0, 2.0, -5.0];
        for (j, w) in want.iter().enumerate() {
            assert!((v.coeff(j) - c(*w, 0.0)).norm() < 1e-13, "degree {j}");
        }
    }

    #[test]
    fn reversion_round_trips_both_ways() {
        let mut u = pseudo_random(16, 77, 0.3);
        u.set_coeff(0, Cplx::ZERO).unwrap();
        u.set_coeff(1, c(1.0, -0.5)).unwrap();
        let v = reversion(&u).unwrap();
        let z = TaylorSeries::identity(16);
        assert!(tcompose(&u, &v).unwrap().max_coeff_diff(&z) < 1e-10);
        assert!(tcompose(&v, &u).unwrap().max_coeff_diff(&z) < 1e-10);

        assert!(matches!(
            reversion(&TaylorSeries::monomial(2, 8).unwrap()),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn serde_round_trip_and_diagnostics() {
        let mut f = TaylorSeries::zero(16);
        f.set_coeff(1, c(1.0, 0.0)).unwrap();
        f.set_coeff(5, c(-0.25, 1.5)).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"trunc":16,"coeffs":[[1,1.0,0.0],[5,-0.25,1.5]]}"#);
        let back: TaylorSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);

        let bad = r#"{"trunc":4,"coeffs":[[9,1.0,0.0]]}"#;
        let err = serde_json::from_str::<TaylorSeries>(bad).unwrap_err();
        assert!(err.to_string().contains("degree 9"));
    }
}
