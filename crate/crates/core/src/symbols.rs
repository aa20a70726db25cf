//! Composition symbols φ(s) = c0·s + ψ(s) acting on vertical half-planes,
//! where ψ is a truncated Dirichlet series. The integer c0 is the
//! characteristic, ψ's index-1 coefficient c1 the translation term.
//!
//! The key primitive is `power_term`: the expansion of k^{-φ(s)} as a
//! Dirichlet series supported on multiples of k^{c0}, which drives both
//! series composition and symbol composition.

use crate::error::Error;
use crate::series::DirichletSeries;
use crate::{Cplx, Result, ZERO_TOL};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    c0: u64,
    psi: DirichletSeries,
}

/// Expansion of k^{-φ(s)}. When k^{c0} exceeds the truncation the series
/// is identically zero and `overflow` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTerm {
    pub series: DirichletSeries,
    pub overflow: bool,
}

/// Half-plane mapping evidence for φ(C_0) ⊂ C_0. `certified` is a proof
/// from the coefficient bound; the sampled minimum is evidence only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingCheck {
    pub certified: bool,
    pub margin: f64,
    pub sampled_min: f64,
    pub samples: usize,
}

impl Symbol {
    pub fn new(c0: u64, psi: DirichletSeries) -> Self {
        Symbol { c0, psi }
    }

    /// φ(s) = c0·s + c1.
    pub fn affine(c0: u64, c1: Cplx, trunc: usize) -> Self {
        Symbol {
            c0,
            psi: DirichletSeries::constant(c1, trunc),
        }
    }

    /// φ(s) = s.
    pub fn identity(trunc: usize) -> Self {
        Symbol {
            c0: 1,
            psi: DirichletSeries::zero(trunc),
        }
    }

    pub fn c0(&self) -> u64 {
        self.c0
    }

    /// Translation term c1 = ψ's coefficient at index 1.
    pub fn c1(&self) -> Cplx {
        self.psi.coeff(1)
    }

    pub fn psi(&self) -> &DirichletSeries {
        &self.psi
    }

    /// ψ with the translation term removed.
    pub fn psi0(&self) -> DirichletSeries {
        self.psi.without_constant()
    }

    pub fn trunc(&self) -> usize {
        self.psi.trunc()
    }

    /// True when ψ has no coefficients beyond the translation term.
    pub fn is_affine(&self) -> bool {
        self.psi0().is_zero()
    }

    pub fn resized(&self, trunc: usize) -> Self {
        Symbol {
            c0: self.c0,
            psi: self.psi.resized(trunc),
        }
    }

    /// Pointwise value c0·s + ψ(s) of the truncated symbol.
    pub fn evaluate(&self, s: Cplx) -> Cplx {
        Cplx::new(self.c0 as f64, 0.0) * s + self.psi.evaluate(s)
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let char_diff = if self.c0 == other.c0 { 0.0 } else { f64::INFINITY };
        char_diff.max(self.psi.max_coeff_diff(&other.psi))
    }
}

/// Expansion of k^{-φ(s)} for k >= 2.
///
/// k^{-φ} = k^{-c1} · exp(-(log k)·ψ0(s)) · k^{-c0·s}; the exponential is a
/// Dirichlet series with constant term 1, and multiplying by k^{-c0 s}
/// dilates its support onto k^{c0}·ℕ. The coefficient at k^{c0} itself is
/// exactly k^{-c1}.
pub fn power_term(k: u64, phi: &Symbol) -> Result<PowerTerm> {
    if k < 2 {
        return Err(Error::Invalid(format!("power term needs k >= 2, got {k}")));
    }
    if phi.c0 < 1 {
        return Err(Error::Characteristic {
            got: phi.c0,
            need: "c0 >= 1",
        });
    }
    let n = phi.trunc();
    let kc0 = match checked_pow_u64(k, phi.c0) {
        Some(v) if v <= n as u64 => v,
        _ => {
            return Ok(PowerTerm {
                series: DirichletSeries::zero(n),
                overflow: true,
            })
        }
    };
    let log_k = (k as f64).ln();
    let scalar = (-phi.c1() * log_k).exp();
    let inner_trunc = n / kc0 as usize;
    let inner = phi
        .psi0()
        .resized(inner_trunc)
        .scale(Cplx::new(-log_k, 0.0))
        .dexp();
    let mut series = DirichletSeries::zero(n);
    for j in 1..=inner_trunc as u64 {
        let a = inner.coeff(j);
        if a != Cplx::ZERO {
            series.set_coeff(kc0 * j, scalar * a)?;
        }
    }
    Ok(PowerTerm { series, overflow: false })
}

fn checked_pow_u64(base: u64, exp: u64) -> Option<u64> {
    let e: u32 = exp.try_into().ok()?;
    base.checked_pow(e)
}

/// Composition f ∘ φ of a Dirichlet series with a symbol:
/// f∘φ = f_1 + sum over k >= 2 of f_k · k^{-φ(s)}. Exact on the shared
/// truncation; terms whose support starts beyond N contribute nothing.
pub fn compose(f: &DirichletSeries, phi: &Symbol) -> Result<DirichletSeries> {
    if f.trunc() != phi.trunc() {
        return Err(Error::TruncationMismatch(f.trunc(), phi.trunc()));
    }
    if phi.c0 < 1 {
        return Err(Error::Characteristic {
            got: phi.c0,
            need: "c0 >= 1",
        });
    }
    let n = f.trunc();
    let mut out = DirichletSeries::constant(f.coeff(1), n);
    // indices beyond N^(1/c0) can only feed coefficients beyond N
    for k in 2..=n as u64 {
        let fk = f.coeff(k);
        if fk == Cplx::ZERO {
            continue;
        }
        let pt = power_term(k, phi)?;
        if pt.overflow {
            continue;
        }
        out = out.add(&pt.series.scale(fk))?;
    }
    Ok(out)
}

/// Symbol composition u ∘ φ. With u = d0·s + ψ_u and φ = c0·s + ψ_φ,
/// u(φ(s)) = (d0·c0)·s + d0·ψ_φ(s) + ψ_u(φ(s)).
pub fn compose_symbols(outer: &Symbol, inner: &Symbol) -> Result<Symbol> {
    let c0 = outer.c0.checked_mul(inner.c0).ok_or(Error::Characteristic {
        got: outer.c0,
        need: "product of characteristics within u64",
    })?;
    let translated = compose(&outer.psi, inner)?;
    let psi = inner
        .psi
        .scale(Cplx::new(outer.c0 as f64, 0.0))
        .add(&translated)?;
    Ok(Symbol { c0, psi })
}

/// n-fold self-composition φ^{[n]}; n = 0 gives the identity symbol.
pub fn iterate(phi: &Symbol, n: usize) -> Result<Symbol> {
    if phi.c0 < 1 {
        return Err(Error::Characteristic {
            got: phi.c0,
            need: "c0 >= 1",
        });
    }
    let mut acc = Symbol::identity(phi.trunc());
    for _ in 0..n {
        acc = compose_symbols(&acc, phi)?;
    }
    Ok(acc)
}

/// Compositional inverse of a characteristic-one symbol u = s + ψ_u(s),
/// via the fixed-point iteration v ← id - ψ_u∘v in coefficient space.
/// The iteration is triangular in the index, so it terminates exactly in
/// about log2(N) sweeps; `tol`/`max_iter` only guard degenerate inputs.
pub fn invert(u: &Symbol, tol: f64, max_iter: usize) -> Result<Symbol> {
    if u.c0 != 1 {
        return Err(Error::Characteristic {
            got: u.c0,
            need: "c0 = 1 for compositional inversion",
        });
    }
    let mut v = Symbol::identity(u.trunc());
    let mut last_change = f64::INFINITY;
    for _ in 0..max_iter {
        let next = Symbol {
            c0: 1,
            psi: compose(&u.psi, &v)?.scale(Cplx::new(-1.0, 0.0)),
        };
        last_change = next.psi.max_coeff_diff(&v.psi);
        v = next;
        if last_change <= tol {
            return Ok(v);
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_change,
    })
}

/// Coefficient sum S(σ) = sum_{k>=2} |c_k| (log k) k^{-σ}: a bound for
/// |ψ'| on Re s >= σ. S < 1 certifies injectivity of φ there.
pub fn derivative_bound(phi: &Symbol, sigma: f64) -> f64 {
    let psi0 = phi.psi0();
    (2..=phi.trunc() as u64)
        .map(|k| {
            let a = psi0.coeff(k).norm();
            if a == 0.0 {
                0.0
            } else {
                let lk = (k as f64).ln();
                a * lk * (k as f64).powf(-sigma)
            }
        })
        .sum()
}

/// Smallest σ (up to bisection tolerance 1e-12) with
/// sum_{k>=2} |c_k| (log k) k^{-σ} <= 1/2; -inf when ψ has no such terms.
/// The returned abscissa certifies injectivity of φ on Re s > σ with a
/// margin of 1/2 in the derivative bound.
pub fn injectivity_abscissa(phi: &Symbol) -> f64 {
    if phi.is_affine() {
        return f64::NEG_INFINITY;
    }
    let target = 0.5;
    let mut hi = 0.0;
    let mut step = 1.0;
    while derivative_bound(phi, hi) > target {
        hi += step;
        step *= 2.0;
    }
    let mut lo = hi - step;
    while derivative_bound(phi, lo) <= target {
        lo -= step;
        step *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if derivative_bound(phi, mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 {
            break;
        }
    }
    hi
}

/// Lower bound for Re φ on the half-plane Re s >= σ:
/// c0·σ + Re(c1) - sum_{k>=2} |c_k| k^{-σ}.
pub fn image_lower_bound(phi: &Symbol, sigma: f64) -> f64 {
    let psi0 = phi.psi0();
    let tail: f64 = (2..=phi.trunc() as u64)
        .map(|k| psi0.coeff(k).norm() * (k as f64).powf(-sigma))
        .sum();
    phi.c0 as f64 * sigma + phi.c1().re - tail
}

/// Does φ map Re s > 0 into itself? The coefficient bound
/// image_lower_bound(φ, 0) >= 0 is a proof; otherwise the boundary line
/// Re s = 0 is sampled and only evidence is reported.
pub fn mapping_check(phi: &Symbol, samples: usize) -> Result<MappingCheck> {
    if phi.c0 < 1 {
        return Err(Error::Characteristic {
            got: phi.c0,
            need: "c0 >= 1",
        });
    }
    let samples = samples.max(2);
    let margin = image_lower_bound(phi, 0.0);
    // Re(c0·it) = 0, so only ψ matters on the boundary line.
    let window = 100.0;
    let mut sampled_min = f64::INFINITY;
    for j in 0..samples {
        let t = window * j as f64 / (samples - 1) as f64;
        let v = phi.psi.evaluate(Cplx::new(0.0, t));
        sampled_min = sampled_min.min(v.re);
    }
    Ok(MappingCheck {
        certified: margin >= 0.0,
        margin,
        sampled_min,
        samples,
    })
}

/// Support of a series is contained in m·ℕ up to the zero tolerance.
pub fn support_in_multiples(f: &DirichletSeries, m: u64) -> bool {
    (1..=f.trunc() as u64).all(|n| n % m == 0 || f.coeff(n).norm() <= ZERO_TOL)
}
