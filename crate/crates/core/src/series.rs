//! Truncated Dirichlet series sum a_n n^{-s}, n = 1..N, with exact
//! divisor-convolution arithmetic.
//!
//! Products and exponentials of series supported on 1..N are themselves
//! exact on 1..N (the missing tail never feeds back into low indices), so
//! none of the arithmetic here carries a tolerance.

use crate::error::Error;
use crate::{Cplx, Result, ZERO_TOL};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSeries {
    /// coeffs[i] is the coefficient of (i+1)^{-s}.
    coeffs: Vec<Cplx>,
}

impl DirichletSeries {
    /// All-zero series with coefficients 1..trunc.
    pub fn zero(trunc: usize) -> Self {
        assert!(trunc >= 1, "truncation must be at least 1");
        DirichletSeries {
            coeffs: vec![Cplx::ZERO; trunc],
        }
    }

    /// The constant series 1.
    pub fn one(trunc: usize) -> Self {
        Self::constant(Cplx::new(1.0, 0.0), trunc)
    }

    /// The constant series a·1^{-s}.
    pub fn constant(a: Cplx, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = a;
        s
    }

    /// The basis series n^{-s}.
    pub fn basis(n: u64, trunc: usize) -> Result<Self> {
        let mut s = Self::zero(trunc);
        s.set_coeff(n, Cplx::new(1.0, 0.0))?;
        Ok(s)
    }

    pub fn from_coeffs(coeffs: Vec<Cplx>) -> Self {
        assert!(!coeffs.is_empty(), "truncation must be at least 1");
        DirichletSeries { coeffs }
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    /// Coefficient of n^{-s}; zero beyond the truncation.
    pub fn coeff(&self, n: u64) -> Cplx {
        if n == 0 || n > self.coeffs.len() as u64 {
            Cplx::ZERO
        } else {
            self.coeffs[(n - 1) as usize]
        }
    }

    pub fn set_coeff(&mut self, n: u64, value: Cplx) -> Result<()> {
        if n == 0 || n > self.coeffs.len() as u64 {
            return Err(Error::TruncationOverflow {
                index: n,
                trunc: self.coeffs.len(),
            });
        }
        self.coeffs[(n - 1) as usize] = value;
        Ok(())
    }

    fn same_trunc(&self, other: &Self) -> Result<usize> {
        if self.trunc() != other.trunc() {
            return Err(Error::TruncationMismatch(self.trunc(), other.trunc()));
        }
        Ok(self.trunc())
    }

    /// Restriction to a shorter truncation (or zero-padding to a longer one).
    pub fn resized(&self, trunc: usize) -> Self {
        assert!(trunc >= 1, "truncation must be at least 1");
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(trunc, Cplx::ZERO);
        DirichletSeries { coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_trunc(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(DirichletSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_trunc(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(DirichletSeries { coeffs })
    }

    pub fn scale(&self, a: Cplx) -> Self {
        DirichletSeries {
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    /// Copy with the constant term (index 1) zeroed.
    pub fn without_constant(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = Cplx::ZERO;
        s
    }

    /// Dirichlet (divisor) convolution: result_n = sum over d | n of
    /// self_d · other_{n/d}. Exact on 1..N in O(N log N) operations.
    pub fn dmul(&self, other: &Self) -> Result<Self> {
        let n = self.same_trunc(other)?;
        let mut out = vec![Cplx::ZERO; n];
        for d in 1..=n {
            let fd = self.coeffs[d - 1];
            if fd == Cplx::ZERO {
                continue;
            }
            let mut m = 1;
            while d * m <= n {
                out[d * m - 1] += fd * other.coeffs[m - 1];
                m += 1;
            }
        }
        Ok(DirichletSeries { coeffs: out })
    }

    /// Exponential exp(g) in the Dirichlet convolution algebra.
    ///
    /// F_1 = e^{g_1}; for n >= 2 the log-derivative recurrence
    /// F_n = (1/log n) · sum over divisors d > 1 of n of (log d)·g_d·F_{n/d}
    /// determines the rest triangularly (F_{n/d} always has smaller index).
    pub fn dexp(&self) -> Self {
        let n = self.trunc();
        let mut out = vec![Cplx::ZERO; n];
        out[0] = self.coeffs[0].exp();
        for m in 2..=n {
            let mut acc = Cplx::ZERO;
            for d in 2..=m {
                if m % d == 0 {
                    let gd = self.coeffs[d - 1];
                    if gd != Cplx::ZERO {
                        acc += (d as f64).ln() * gd * out[m / d - 1];
                    }
                }
            }
            out[m - 1] = acc / (m as f64).ln();
        }
        DirichletSeries { coeffs: out }
    }

    /// Index dilation: coefficient at k·n becomes f_n; everything beyond the
    /// truncation is dropped. k = 1 is the identity.
    pub fn dilate(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("dilation factor must be >= 1".into()));
        }
        let n = self.trunc();
        let mut out = vec![Cplx::ZERO; n];
        let mut idx: u64 = 1;
        while let Some(target) = idx.checked_mul(k) {
            if target > n as u64 {
                break;
            }
            out[(target - 1) as usize] = self.coeffs[(idx - 1) as usize];
            idx += 1;
        }
        Ok(DirichletSeries { coeffs: out })
    }

    /// Pointwise value sum a_n n^{-s} of the truncated series.
    pub fn evaluate(&self, s: Cplx) -> Cplx {
        let mut acc = Cplx::ZERO;
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Cplx::ZERO {
                continue;
            }
            let n = (i + 1) as f64;
            acc += a * (-s * n.ln()).exp();
        }
        acc
    }

    /// sum |a_n| n^{-sigma}: a uniform bound for |f| on Re s >= sigma.
    pub fn sup_bound(&self, sigma: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm() * ((i + 1) as f64).powf(-sigma))
            .sum()
    }

    /// First index whose coefficient exceeds `zero_tol` in modulus.
    pub fn leading_term(&self, zero_tol: f64) -> Result<(u64, Cplx)> {
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm() > zero_tol {
                return Ok(((i + 1) as u64, *a));
            }
        }
        Err(Error::NoLeadingTerm)
    }

    /// Termwise derivative: a_n ↦ -a_n log n.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| -a * ((i + 1) as f64).ln())
            .collect();
        DirichletSeries { coeffs }
    }

    /// sum of |a_n| over the truncation.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).sum()
    }

    /// Largest coefficient modulus of the difference.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.trunc().max(other.trunc());
        (1..=n as u64)
            .map(|i| (self.coeff(i) - other.coeff(i)).norm())
            .fold(0.0, f64::max)
    }

    /// True when every coefficient is at or below the shared zero tolerance.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.norm() <= ZERO_TOL)
    }
}

impl std::fmt::Display for DirichletSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm() <= ZERO_TOL {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            if i == 0 {
                write!(f, "({a})")?;
            } else {
                write!(f, "({a})·{}^(-s)", i + 1)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Wire format: {"trunc": N, "coeffs": [[n, re, im], ...]}, zeros omitted,
/// indices strictly increasing.
#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    trunc: usize,
    coeffs: Vec<(u64, f64, f64)>,
}

impl Serialize for DirichletSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Cplx::ZERO)
            .map(|(i, a)| ((i + 1) as u64, a.re, a.im))
            .collect();
        SeriesRepr {
            trunc: self.trunc(),
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DirichletSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.trunc == 0 {
            return Err(D::Error::custom("truncation must be at least 1"));
        }
        let mut out = DirichletSeries::zero(repr.trunc);
        let mut seen = 0u64;
        for (n, re, im) in repr.coeffs {
            if n == 0 || n > repr.trunc as u64 {
                return Err(D::Error::custom(format!(
                    "coefficient index {n} outside 1..{}",
                    repr.trunc
                )));
            }
            if n <= seen {
                return Err(D::Error::custom(format!(
                    "coefficient index {n} repeated or out of order"
                )));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(D::Error::custom(format!(
                    "non-finite coefficient at index {n}"
                )));
            }
            seen = n;
            out.coeffs[(n - 1) as usize] = Cplx::new(re, im);
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

    /// Independent O(N^2) convolution: loop over all index pairs.
    fn brute_convolution(f: &DirichletSeries, g: &DirichletSeries) -> DirichletSeries {
        let n = f.trunc();
        let mut out = DirichletSeries::zero(n);
        for i in 1..=n as u64 {
            for j in 1..=n as u64 {
                if i * j <= n as u64 {
                    let v = out.coeff(i * j) + f.coeff(i) * g.coeff(j);
                    out.set_coeff(i * j, v).unwrap();
                }
            }
        }
        out
    }

    /// Independent exponential: e^{g_1} · sum_k (g - g_1)^k / k!, with the
    /// nilpotent part exhausted once 2^k exceeds the truncation.
    fn brute_exp(g: &DirichletSeries) -> DirichletSeries {
        let n = g.trunc();
        let g0 = g.without_constant();
        let mut acc = DirichletSeries::one(n);
        let mut power = DirichletSeries::one(n);
        let mut factorial = 1.0;
        let mut k = 1;
        while (1u64 << k) <= n as u64 {
            power = brute_convolution(&power, &g0);
            factorial *= k as f64;
            acc = acc.add(&power.scale(c(1.0 / factorial, 0.0))).unwrap();
            k += 1;
        }
        acc.scale(g.coeff(1).exp())
    }

    #[test]
    fn dmul_matches_hand_example() {
        // (1 + 2^{-s})(1 + 3^{-s}) = 1 + 2^{-s} + 3^{-s} + 6^{-s}
        let mut f = DirichletSeries::one(8);
        f.set_coeff(2, c(1.0, 0.0)).unwrap();
        let mut g = DirichletSeries::one(8);
        g.set_coeff(3, c(1.0, 0.0)).unwrap();
        let prod = f.dmul(&g).unwrap();
        let mut want = DirichletSeries::one(8);
        want.set_coeff(2, c(1.0, 0.0)).unwrap();
        want.set_coeff(3, c(1.0, 0.0)).unwrap();
        want.set_coeff(6, c(1.0, 0.0)).unwrap();
        assert_eq!(prod, want);
    }

    #[test]
    fn dmul_matches_brute_force() {
        let n = 64;
        let mut f = DirichletSeries::zero(n);
        let mut g = DirichletSeries::zero(n);
        // deterministic pseudo-random fill
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for i in 1..=n as u64 {
            f.set_coeff(i, c(next(), next())).unwrap();
            g.set_coeff(i, c(next(), next())).unwrap();
        }
        let fast = f.dmul(&g).unwrap();
        let slow = brute_convolution(&f, &g);
        assert!(fast.max_coeff_diff(&slow) < 1e-12);
    }

    #[test]
    fn dexp_of_single_prime_term_gives_factorials() {
        // exp(a·2^{-s}) has coefficient a^j / j! at 2^j
        let a = c(0.3, -0.7);
        let mut g = DirichletSeries::zero(64);
        g.set_coeff(2, a).unwrap();
        let f = g.dexp();
        let mut expected = c(1.0, 0.0);
        let mut factorial = 1.0;
        for j in 0..=6u32 {
            if j > 0 {
                expected *= a;
                factorial *= j as f64;
            }
            let idx = 2u64.pow(j);
            assert!((f.coeff(idx) - expected / factorial).norm() < 1e-14);
        }
        // off the powers of two everything vanishes
        assert!(f.coeff(3).norm() == 0.0);
        assert!(f.coeff(6).norm() == 0.0);
    }

    #[test]
    fn dexp_matches_term_by_term_oracle() {
        let n = 64;
        let mut g = DirichletSeries::zero(n);
        let mut state = 0x13198a2e03707344u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 1..=n as u64 {
            g.set_coeff(i, c(next(), next())).unwrap();
        }
        let fast = g.dexp();
        let slow = brute_exp(&g);
        assert!(fast.max_coeff_diff(&slow) < 1e-12);
    }

    #[test]
    fn dilate_moves_support() {
        let mut f = DirichletSeries::one(12);
        f.set_coeff(2, c(0.5, 0.0)).unwrap();
        let d = f.dilate(3).unwrap();
        assert_eq!(d.coeff(3), c(1.0, 0.0));
        assert_eq!(d.coeff(6), c(0.5, 0.0));
        assert_eq!(d.coeff(1), Cplx::ZERO);
        assert_eq!(d.coeff(2), Cplx::ZERO);
        // identity dilation
        assert_eq!(f.dilate(1).unwrap(), f);
    }

    #[test]
    fn evaluate_and_sup_bound_agree_on_positive_coefficients() {
        let mut f = DirichletSeries::zero(16);
        for i in 1..=16u64 {
            f.set_coeff(i, c(1.0 / i as f64, 0.0)).unwrap();
        }
        let sigma = 2.0;
        let val = f.evaluate(c(sigma, 0.0));
        assert!((val.re - f.sup_bound(sigma)).abs() < 1e-14);
        assert!(val.im.abs() < 1e-14);
        // and the bound dominates at a complex point with the same real part
        let v = f.evaluate(c(sigma, 5.0));
        assert!(v.norm() <= f.sup_bound(sigma) + 1e-14);
    }

    #[test]
    fn leading_term_and_derivative() {
        let mut f = DirichletSeries::zero(10);
        f.set_coeff(3, c(0.0, 2.0)).unwrap();
        f.set_coeff(5, c(1.0, 0.0)).unwrap();
        let (n, a) = f.leading_term(ZERO_TOL).unwrap();
        assert_eq!(n, 3);
        assert_eq!(a, c(0.0, 2.0));
        let df = f.derivative();
        assert!((df.coeff(3) + c(0.0, 2.0) * 3f64.ln()).norm() < 1e-15);
        assert!(DirichletSeries::zero(4).leading_term(ZERO_TOL).is_err());
    }

    #[test]
    fn serde_round_trip_and_diagnostics() {
        let mut f = DirichletSeries::zero(32);
        f.set_coeff(1, c(1.0, 0.0)).unwrap();
        f.set_coeff(7, c(-0.25, 1.5)).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"trunc":32,"coeffs":[[1,1.0,0.0],[7,-0.25,1.5]]}"#);
        let back: DirichletSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);

        let bad = r#"{"trunc":4,"coeffs":[[9,1.0,0.0]]}"#;
        let err = serde_json::from_str::<DirichletSeries>(bad).unwrap_err();
        assert!(err.to_string().contains("index 9"));
    }
}
