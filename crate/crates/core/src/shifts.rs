//! Direct sums of weighted forward shifts. A characteristic-`c0` affine
//! symbol acts block-diagonally on the zero-mean subspace, one weighted shift
//! per admissible block label; this module builds those weight families,
//! solves for the operators intertwining two shifts (lower-triangular
//! "pattern" operators), assembles commutant and double-commutant structure
//! reports at finite truncation, partitions block labels into equivalence
//! classes by the drift of partial-product ratios, and checks the Cesàro
//! polynomial approximation of a pattern operator.

use std::collections::BTreeMap;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::concurrency;
use crate::linalg::Matrix;
use crate::verdict::Verdict;
use crate::{Cplx, Error, Result};

/// Max factor by which a pattern's largest entry may grow between the base
/// horizon K - growth_window and the full horizon K before the stability
/// filter discards it as unbounded-looking.
const STABILITY_GROWTH_CAP: f64 = 1e2;

/// Log-range under which a partial-product ratio sequence is treated as
/// bounded in both directions by the finite-horizon classifier.
const BOUNDED_BAND: f64 = 6.907_755_278_982_137; // ln(1e3)

/// An indexed collection of weight sequences, one per block label, each of
/// length `k + 1` (entries w_0..w_K). All weights are nonzero and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFamily {
    k: usize,
    blocks: BTreeMap<u64, Vec<Cplx>>,
}

impl WeightFamily {
    pub fn new(k: usize, blocks: BTreeMap<u64, Vec<Cplx>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Invalid(
                "weight family needs at least one block".into(),
            ));
        }
        for (&m, w) in &blocks {
            if m == 0 {
                return Err(Error::Invalid("block labels must be positive".into()));
            }
            if w.len() != k + 1 {
                return Err(Error::TruncationMismatch(w.len().saturating_sub(1), k));
            }
            for (j, z) in w.iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() || z.norm() == 0.0 {
                    return Err(Error::InvalidWeight { m, k: j });
                }
            }
        }
        Ok(WeightFamily { k, blocks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> Vec<u64> {
        self.blocks.keys().copied().collect()
    }

    pub fn block(&self, m: u64) -> Option<&[Cplx]> {
        self.blocks.get(&m).map(|w| w.as_slice())
    }

    pub fn blocks(&self) -> &BTreeMap<u64, Vec<Cplx>> {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sup_weight(&self) -> f64 {
        self.blocks
            .values()
            .flat_map(|w| w.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// The truncated forward shift of one block, as a (k+1) x (k+1) matrix.
    pub fn shift_matrix(&self, m: u64) -> Option<Matrix> {
        self.block(m).map(|w| shift_matrix(w, self.k + 1))
    }

    /// Block-diagonal direct sum of all shift matrices, blocks in label order.
    pub fn direct_sum(&self) -> Matrix {
        let n = self.k + 1;
        let d = n * self.len();
        let mut out = Matrix::zeros(d, d);
        for (b, w) in self.blocks.values().enumerate() {
            for j in 0..self.k {
                out[(b * n + j + 1, b * n + j)] = w[j];
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    #[serde(rename = "K")]
    k: usize,
    blocks: BTreeMap<u64, Vec<(f64, f64)>>,
}

impl Serialize for WeightFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = FamilyRepr {
            k: self.k,
            blocks: self
                .blocks
                .iter()
                .map(|(&m, w)| (m, w.iter().map(|z| (z.re, z.im)).collect()))
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FamilyRepr::deserialize(deserializer)?;
        let blocks = repr
            .blocks
            .into_iter()
            .map(|(m, w)| (m, w.into_iter().map(|(re, im)| Cplx::new(re, im)).collect()))
            .collect();
        WeightFamily::new(repr.k, blocks).map_err(D::Error::custom)
    }
}

/// S_w on the first `size` basis vectors: e_k maps to w_k e_{k+1}.
pub fn shift_matrix(w: &[Cplx], size: usize) -> Matrix {
    assert!(w.len() + 1 >= size, "need {} weights", size - 1);
    let mut s = Matrix::zeros(size, size);
    for k in 0..size - 1 {
        s[(k + 1, k)] = w[k];
    }
    s
}

/// The lower-triangular operator with entries
/// t_{i,j} = a_{i-j} (w_0...w_{i-1}) / (w'_0...w'_{j-1}) for j <= i, where w
/// is the target block's weight sequence and w' the source block's. Every
/// operator intertwining two truncated shifts has this shape.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternOperator {
    pub a: Vec<Cplx>,
    pub target: u64,
    pub source: u64,
}

impl PatternOperator {
    /// Single-diagonal pattern a = delta_p on k+1 coefficients.
    pub fn delta(p: usize, k: usize, target: u64, source: u64) -> Self {
        let mut a = vec![Cplx::ZERO; k + 1];
        a[p] = Cplx::ONE;
        PatternOperator { a, target, source }
    }

    /// Realizes the (n x n) matrix over the given weight sequences,
    /// n = a.len(). Prefix products stay in f64 range at desk-scale
    /// truncations; that is the working envelope of this module.
    pub fn matrix(&self, w_target: &[Cplx], w_source: &[Cplx]) -> Matrix {
        let n = self.a.len();
        let pt = prefix_products(w_target, n);
        let ps = prefix_products(w_source, n);
        let mut t = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                if self.a[i - j] != Cplx::ZERO {
                    t[(i, j)] = self.a[i - j] * pt[i] / ps[j];
                }
            }
        }
        t
    }

    /// Reads the pattern coefficients off the first column of `t` and
    /// returns the largest mismatch between `t` and the reconstructed
    /// pattern, relative to the largest entry of `t`.
    pub fn from_matrix(
        t: &Matrix,
        w_target: &[Cplx],
        w_source: &[Cplx],
        target: u64,
        source: u64,
    ) -> (Self, f64) {
        let n = t.rows();
        let pt = prefix_products(w_target, n);
        let ps = prefix_products(w_source, n);
        let a: Vec<Cplx> = (0..n).map(|p| t[(p, 0)] / pt[p]).collect();
        let scale = t.max_abs().max(f64::MIN_POSITIVE);
        let mut resid = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let model = if j <= i { a[i - j] * pt[i] / ps[j] } else { Cplx::ZERO };
                resid = resid.max((t[(i, j)] - model).norm());
            }
        }
        (PatternOperator { a, target, source }, resid / scale)
    }
}

fn prefix_products(w: &[Cplx], n: usize) -> Vec<Cplx> {
    assert!(w.len() + 1 >= n);
    let mut p = Vec::with_capacity(n);
    let mut acc = Cplx::ONE;
    p.push(acc);
    for &z in w.iter().take(n - 1) {
        acc *= z;
        p.push(acc);
    }
    p
}

fn prefix_log_sums(w: &[Cplx], n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n);
    let mut acc = 0.0;
    p.push(acc);
    for &z in w.iter().take(n - 1) {
        acc += z.norm().ln();
        p.push(acc);
    }
    p
}

/// Block labels `2..=m_max` that are not a perfect c0^k-th power of a smaller
/// integer (k >= 1). These index the shift blocks of the direct sum.
pub fn canonical_labels(c0: u64, m_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    'next: for m in 2..=m_max {
        let mut e = c0 as u128;
        while (2u128).pow(e.min(127) as u32) <= m as u128 {
            if let Some(n) = integer_root(m, e as u32) {
                if n >= 2 {
                    continue 'next;
                }
            }
            e *= c0 as u128;
        }
        out.push(m);
    }
    out
}

fn integer_root(m: u64, e: u32) -> Option<u64> {
    let guess = (m as f64).powf(1.0 / e as f64).round() as u64;
    for n in guess.saturating_sub(1)..=guess + 1 {
        if n >= 2 && (n as u128).checked_pow(e) == Some(m as u128) {
            return Some(n);
        }
    }
    None
}

/// The weight family of the affine symbol with characteristic `c0 >= 2` and
/// translation term `c1` (Re c1 > 0): block m carries weights m^(-c0^k c1)
/// for k = 0..=K, over the admissible labels up to `m_max`.
pub fn canonical_family(c0: u64, c1: Cplx, m_max: u64, k: usize) -> Result<WeightFamily> {
    if c0 < 2 {
        return Err(Error::Characteristic {
            got: c0,
            need: "at least 2 for the shift decomposition",
        });
    }
    if c1.re <= 0.0 {
        return Err(Error::Invalid(format!(
            "canonical weights need Re(c1) > 0, got {}",
            c1.re
        )));
    }
    let mut blocks = BTreeMap::new();
    for m in canonical_labels(c0, m_max) {
        let ln_m = (m as f64).ln();
        let mut w = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let tower = (c0 as f64).powi(j as i32);
            let z = if c1.im == 0.0 {
                Cplx::new((m as f64).powf(-c1.re * tower), 0.0)
            } else {
                (-c1 * tower * ln_m).exp()
            };
            if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidWeight { m, k: j });
            }
            w.push(z);
        }
        blocks.insert(m, w);
    }
    WeightFamily::new(k, blocks)
}

/// Two-block family whose weights alternate between 2 and 1/2 over dyadic
/// runs (block 2 takes the reciprocals). The partial-product ratio between
/// the blocks drifts unboundedly in both directions, so the blocks fall in
/// different equivalence classes once the horizon sees both drifts.
pub fn alternating_example(k: usize) -> WeightFamily {
    let w: Vec<Cplx> = (0..=k)
        .map(|l| {
            if l == 0 {
                Cplx::ONE
            } else if l.ilog2() % 2 == 0 {
                Cplx::new(2.0, 0.0)
            } else {
                Cplx::new(0.5, 0.0)
            }
        })
        .collect();
    let w_inv: Vec<Cplx> = w.iter().map(|z| Cplx::ONE / z).collect();
    let mut blocks = BTreeMap::new();
    blocks.insert(1, w);
    blocks.insert(2, w_inv);
    WeightFamily::new(k, blocks).expect("alternating weights are nonzero")
}

#[derive(Debug, Clone)]
pub struct IntertwinerBasis {
    pub dimension: usize,
    pub patterns: Vec<PatternOperator>,
    /// Largest relative mismatch between a basis matrix and its pattern
    /// reconstruction.
    pub max_pattern_residual: f64,
    /// Largest |T S_{w'} - S_w T| entry over the basis (unit-norm T).
    pub max_commute_residual: f64,
}

/// Brute-force basis of {T : T S_{w'} = S_w T} on k+1 coefficients. Each
/// equation couples at most two unknowns, so rows are normalized to unit
/// scale before elimination; the weights themselves may span hundreds of
/// orders of magnitude.
pub fn intertwiner_basis(w: &[Cplx], w_prime: &[Cplx], k: usize) -> Result<IntertwinerBasis> {
    for (name, seq) in [("w", w), ("w'", w_prime)] {
        if seq.len() < k {
            return Err(Error::Invalid(format!(
                "{name} needs at least {k} weights for truncation {k}"
            )));
        }
        if seq.iter().take(k).any(|z| z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid(format!("{name} has a zero or non-finite weight")));
        }
    }
    let n = k + 1;
    let idx = |i: usize, j: usize| i * n + j;
    let mut rows: Vec<Vec<Cplx>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            // (T S_{w'} - S_w T)_{i,j} = w'_j t_{i,j+1} - w_{i-1} t_{i-1,j}
            let mut row = vec![Cplx::ZERO; n * n];
            let mut scale = 0.0f64;
            if j + 1 < n {
                row[idx(i, j + 1)] = w_prime[j];
                scale = scale.max(w_prime[j].norm());
            }
            if i > 0 {
                row[idx(i - 1, j)] -= w[i - 1];
                scale = scale.max(w[i - 1].norm());
            }
            if scale == 0.0 {
                continue;
            }
            let inv = Cplx::new(1.0 / scale, 0.0);
            for z in row.iter_mut() {
                *z *= inv;
            }
            rows.push(row);
        }
    }
    let system = Matrix::from_fn(rows.len(), n * n, |r, c| rows[r][c]);
    let null = system.nullspace(1e-10);
    let s_w = shift_matrix(w, n);
    let s_wp = shift_matrix(w_prime, n);
    let mut patterns = Vec::with_capacity(null.len());
    let mut max_pattern = 0.0f64;
    let mut max_commute = 0.0f64;
    for v in &null {
        let t = Matrix::from_fn(n, n, |i, j| v[idx(i, j)]);
        let (pat, resid) = PatternOperator::from_matrix(&t, w, w_prime, 0, 0);
        max_pattern = max_pattern.max(resid);
        max_commute = max_commute.max(t.matmul(&s_wp).sub(&s_w.matmul(&t)).max_abs());
        patterns.push(pat);
    }
    Ok(IntertwinerBasis {
        dimension: null.len(),
        patterns,
        max_pattern_residual: max_pattern,
        max_commute_residual: max_commute,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub target: u64,
    pub source: u64,
    pub dimension: usize,
    pub pattern_residual: f64,
    pub commute_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutantReport {
    pub k: usize,
    pub pairs: Vec<PairReport>,
    pub total_dimension: usize,
    /// Every block of every commuting operator matched the pattern shape to
    /// 1e-10.
    pub all_patterned: bool,
}

/// Brute-force commutant of the direct sum, one intertwiner solve per
/// ordered block pair. Pairs are independent, so they fan out across
/// threads; the report is assembled in label order.
pub fn commutant_blocks(family: &WeightFamily) -> Result<CommutantReport> {
    let labels = family.labels();
    let k = family.k();
    let mut jobs = Vec::new();
    for &m in &labels {
        for &n in &labels {
            jobs.push((m, n));
        }
    }
    let reports = concurrency::run_indexed(jobs.len(), |j| {
        let (m, n) = jobs[j];
        let basis = intertwiner_basis(family.block(m).unwrap(), family.block(n).unwrap(), k)?;
        Ok::<PairReport, Error>(PairReport {
            target: m,
            source: n,
            dimension: basis.dimension,
            pattern_residual: basis.max_pattern_residual,
            commute_residual: basis.max_commute_residual,
        })
    });
    let mut pairs = Vec::with_capacity(reports.len());
    for r in reports {
        pairs.push(r?);
    }
    let total_dimension = pairs.iter().map(|p| p.dimension).sum();
    let all_patterned = pairs.iter().all(|p| p.pattern_residual <= 1e-10);
    Ok(CommutantReport {
        k,
        pairs,
        total_dimension,
        all_patterned,
    })
}

/// Stability verdict for the single-diagonal patterns of one ordered block
/// pair: which orders p survive the two-horizon growth filter.
fn stable_orders(
    pl_target: &[f64],
    pl_source: &[f64],
    k: usize,
    base: usize,
    gw: usize,
) -> Vec<usize> {
    let cap = STABILITY_GROWTH_CAP.ln();
    // Ratio certificate: if the partial-product ratio itself stays put, the
    // band factor |w_l ... w_{l+p-1}| is bounded a priori and every order is
    // genuinely bounded.
    let ratio_growth = {
        let full = (0..=k)
            .map(|j| pl_target[j] - pl_source[j])
            .fold(f64::NEG_INFINITY, f64::max);
        let early = (0..=base)
            .map(|j| pl_target[j] - pl_source[j])
            .fold(f64::NEG_INFINITY, f64::max);
        full - early
    };
    if ratio_growth <= cap {
        return (0..=k).collect();
    }
    // Otherwise judge each order on its own entries t_{p+k',k'}, and only
    // where the support is at least a window longer than the base horizon;
    // shorter corners carry too little data to certify.
    let mut kept = Vec::new();
    for p in 0..=k.saturating_sub(gw) {
        let log_entry = |q: usize| pl_target[p + q] - pl_source[q];
        let full = (0..=k - p).map(log_entry).fold(f64::NEG_INFINITY, f64::max);
        let early_end = base.saturating_sub(p);
        let early = (0..=early_end).map(log_entry).fold(f64::NEG_INFINITY, f64::max);
        if full - early <= cap {
            kept.push(p);
        }
    }
    kept
}

#[derive(Debug, Clone, Serialize)]
pub struct KeptDirection {
    pub target: u64,
    pub source: u64,
    pub orders: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleCommutantReport {
    pub k: usize,
    pub growth_window: usize,
    pub base_horizon: usize,
    /// Cross-block intertwiner directions that survived the stability
    /// filter. Diagonal directions always survive in full.
    pub kept: Vec<KeptDirection>,
    pub components_per_order: Vec<usize>,
    pub dimension: usize,
    pub single_shared_pattern: bool,
    pub max_commutation_residual: f64,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Double commutant of the direct sum within the truncated matrix algebra,
/// against the stability-filtered commutant. Finite truncation makes every
/// pattern bounded, so the filter compares each pattern's largest entry at
/// the base horizon K - growth_window with the full horizon K and discards
/// the ones that blow up; this emulates the boundedness constraints the
/// truncation loses (the window reaches down from K because stored data
/// cannot extend upward).
///
/// The solution space itself follows from exact entrywise algebra rather
/// than a dense solve over all (B(K+1))^2 unknowns: the per-block
/// projections and shifts always survive the filter, forcing any solution S
/// to be block-diagonal with pattern blocks, and a kept cross pattern of
/// order p forces the target and source pattern coefficients to agree up to
/// order K - p. Every reported basis element is verified to commute with
/// every kept operator, and unit tests cross-check the dimension against a
/// fully brute-force solve on small families.
pub fn double_commutant_structure(
    family: &WeightFamily,
    growth_window: usize,
) -> Result<DoubleCommutantReport> {
    let k = family.k();
    let labels = family.labels();
    if labels.len() < 2 {
        return Err(Error::Invalid(
            "double commutant structure needs at least two blocks".into(),
        ));
    }
    if growth_window == 0 || growth_window >= k {
        return Err(Error::Invalid(format!(
            "growth window must lie in 1..{k} to leave a base horizon"
        )));
    }
    let base = k - growth_window;
    let n = k + 1;
    let logs: Vec<Vec<f64>> = labels
        .iter()
        .map(|&m| prefix_log_sums(family.block(m).unwrap(), n))
        .collect();

    let mut kept = Vec::new();
    for (bi, &m) in labels.iter().enumerate() {
        for (bj, &nn) in labels.iter().enumerate() {
            if bi == bj {
                continue;
            }
            let orders = stable_orders(&logs[bi], &logs[bj], k, base, growth_window);
            if !orders.is_empty() {
                kept.push(KeptDirection {
                    target: m,
                    source: nn,
                    orders,
                });
            }
        }
    }

    // Link coefficient levels: a kept (target, source) pattern of order p
    // identifies the two blocks' coefficients at every order r with p+r <= K.
    let pos: BTreeMap<u64, usize> = labels.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut components_per_order = Vec::with_capacity(n);
    let mut component_reps: Vec<Vec<usize>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut dsu = Dsu::new(labels.len());
        for dir in &kept {
            if dir.orders.iter().any(|&p| p + r <= k) {
                dsu.union(pos[&dir.target], pos[&dir.source]);
            }
        }
        let owner: Vec<usize> = (0..labels.len()).map(|i| dsu.find(i)).collect();
        let mut reps = owner.clone();
        reps.sort_unstable();
        reps.dedup();
        components_per_order.push(reps.len());
        component_reps.push(owner);
    }
    let dimension: usize = components_per_order.iter().sum();
    let single_shared_pattern = components_per_order.iter().all(|&c| c == 1);

    // Materialize a basis element per (order, component) and verify it
    // commutes with every kept intertwiner (diagonal directions included).
    let d = n * labels.len();
    let embed = |pat: &PatternOperator, bi: usize, bj: usize| -> Matrix {
        let block = pat.matrix(
            family.block(labels[bi]).unwrap(),
            family.block(labels[bj]).unwrap(),
        );
        let mut out = Matrix::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                out[(bi * n + i, bj * n + j)] = block[(i, j)];
            }
        }
        out
    };
    let mut checkers: Vec<Matrix> = Vec::new();
    for bi in 0..labels.len() {
        for p in 0..n {
            checkers.push(embed(&PatternOperator::delta(p, k, 0, 0), bi, bi));
        }
    }
    for dir in &kept {
        for &p in &dir.orders {
            checkers.push(embed(
                &PatternOperator::delta(p, k, 0, 0),
                pos[&dir.target],
                pos[&dir.source],
            ));
        }
    }
    let mut max_resid = 0.0f64;
    for r in 0..n {
        let owner = &component_reps[r];
        let mut reps: Vec<usize> = owner.clone();
        reps.sort_unstable();
        reps.dedup();
        for &root in &reps {
            let mut basis_el = Matrix::zeros(d, d);
            for (bi, &o) in owner.iter().enumerate() {
                if o == root {
                    basis_el = basis_el.add(&embed(&PatternOperator::delta(r, k, 0, 0), bi, bi));
                }
            }
            let scale = 1.0 + basis_el.max_abs();
            for t in &checkers {
                let resid = basis_el.matmul(t).sub(&t.matmul(&basis_el)).max_abs();
                max_resid = max_resid.max(resid / (scale * (1.0 + t.max_abs())));
            }
        }
    }

    Ok(DoubleCommutantReport {
        k,
        growth_window,
        base_horizon: base,
        kept,
        components_per_order,
        dimension,
        single_shared_pattern,
        max_commutation_residual: max_resid,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassMode {
    /// Exact ratio analysis for weights of the form m^(-c0^k c1) (or
    /// unimodular weights, which short-circuit to a single class).
    ClosedForm,
    /// Drift detection on the finite partial-product ratio data.
    FiniteHorizon,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub mode: String,
    pub horizon: usize,
    /// "proof-grade" for closed-form analysis, "evidence-grade" for
    /// finite-horizon drift detection.
    pub confidence: String,
    pub classes: Vec<Vec<u64>>,
    pub verdict: Verdict,
}

fn detect_canonical(family: &WeightFamily) -> Option<(f64, f64)> {
    let mut c0_seen: Option<f64> = None;
    let mut re_seen: Option<f64> = None;
    for (&m, w) in family.blocks() {
        if m < 2 {
            return None;
        }
        let x: Vec<f64> = w.iter().map(|z| z.norm().ln()).collect();
        if x[0] >= 0.0 {
            return None;
        }
        let c0 = if w.len() >= 2 { x[1] / x[0] } else { c0_seen? };
        if !(c0.round() >= 2.0 && (c0 - c0.round()).abs() <= 1e-6 * c0.abs()) {
            return None;
        }
        let c0 = c0.round();
        for j in 1..x.len() {
            if (x[j] - c0.powi(j as i32) * x[0]).abs() > 1e-6 * x[j].abs().max(1.0) {
                return None;
            }
        }
        let re = -x[0] / (m as f64).ln();
        match (c0_seen, re_seen) {
            (None, None) => {
                c0_seen = Some(c0);
                re_seen = Some(re);
            }
            (Some(c0p), Some(rep)) => {
                if c0p != c0 || (rep - re).abs() > 1e-6 * rep.abs().max(1.0) {
                    return None;
                }
            }
            _ => unreachable!(),
        }
    }
    Some((c0_seen?, re_seen?))
}

/// Does the log-ratio sequence drift unboundedly in both directions within
/// the horizon? Evidence: its range exceeds the bounded band and both a new
/// running maximum and a new running minimum appear in the final two thirds.
fn drifts_both_ways(seq: &[f64]) -> bool {
    let hi = seq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = seq.iter().copied().fold(f64::INFINITY, f64::min);
    if hi - lo <= BOUNDED_BAND {
        return false;
    }
    let (mut run_hi, mut run_lo) = (seq[0], seq[0]);
    let (mut last_up, mut last_down) = (0usize, 0usize);
    for (j, &s) in seq.iter().enumerate().skip(1) {
        if s > run_hi + 1e-9 {
            run_hi = s;
            last_up = j;
        }
        if s < run_lo - 1e-9 {
            run_lo = s;
            last_down = j;
        }
    }
    let cutoff = seq.len() / 3;
    last_up >= cutoff && last_down >= cutoff
}

/// Partition of the block labels under the relation "the partial-product
/// ratio sequence stays bounded, or stays bounded away from zero". A single
/// class is exactly the double commutant property for the direct sum.
pub fn equivalence_classes(family: &WeightFamily, mode: ClassMode) -> Result<ClassReport> {
    let labels = family.labels();
    let k = family.k();
    let n = k + 1;
    let (related, mode_name, confidence, note): (Vec<(usize, usize)>, &str, &str, Option<String>) =
        match mode {
            ClassMode::ClosedForm => {
                let unimodular = family
                    .blocks()
                    .values()
                    .flatten()
                    .all(|z| (z.norm() - 1.0).abs() <= 1e-12);
                if unimodular {
                    // Unimodular weights come from a pure vertical
                    // translation; the operator is a non-unitary isometry
                    // and the double commutant property holds outright.
                    let all: Vec<(usize, usize)> = (1..labels.len()).map(|i| (0, i)).collect();
                    (
                        all,
                        "closed-form",
                        "proof-grade",
                        Some("unimodular weights: isometry gate".into()),
                    )
                } else {
                    let (c0, re_c1) = detect_canonical(family).ok_or_else(|| {
                        Error::Invalid(
                            "closed-form mode needs weights m^(-c0^k c1) with Re(c1) > 0, \
                             or unimodular weights"
                                .into(),
                        )
                    })?;
                    // Partial-product ratio of blocks m > n is
                    // (m/n)^(-c1 (c0^{k+1}-1)/(c0-1)): it tends to zero, so
                    // it is bounded and every pair is related.
                    let all: Vec<(usize, usize)> = (1..labels.len()).map(|i| (0, i)).collect();
                    (
                        all,
                        "closed-form",
                        "proof-grade",
                        Some(format!("c0 = {c0}, Re(c1) = {re_c1}")),
                    )
                }
            }
            ClassMode::FiniteHorizon => {
                let logs: Vec<Vec<f64>> = labels
                    .iter()
                    .map(|&m| prefix_log_sums(family.block(m).unwrap(), n + 1))
                    .collect();
                let mut rel = Vec::new();
                for i in 0..labels.len() {
                    for j in i + 1..labels.len() {
                        let seq: Vec<f64> =
                            (1..=n).map(|q| logs[i][q] - logs[j][q]).collect();
                        if !drifts_both_ways(&seq) {
                            rel.push((i, j));
                        }
                    }
                }
                (rel, "finite-horizon", "evidence-grade", None)
            }
        };

    let mut dsu = Dsu::new(labels.len());
    for (i, j) in related {
        dsu.union(i, j);
    }
    let mut by_root: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for (i, &m) in labels.iter().enumerate() {
        by_root.entry(dsu.find(i)).or_default().push(m);
    }
    let classes: Vec<Vec<u64>> = by_root.into_values().collect();

    let single = classes.len() == 1;
    let mut verdict = Verdict::new(
        "double_commutant",
        if single {
            crate::Status::Pass
        } else {
            crate::Status::Fail
        },
    )
    .with_q("classes", classes.len() as f64)
    .with_q("blocks", labels.len() as f64)
    .with_detail(if single {
        "double commutant property holds"
    } else {
        "fails to have the double commutant property"
    });
    if let Some(extra) = note {
        verdict = verdict.with_witness(serde_json::json!({ "analysis": extra }));
    }
    Ok(ClassReport {
        mode: mode_name.into(),
        horizon: k,
        confidence: confidence.into(),
        classes,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CesaroReport {
    pub l_max: usize,
    /// Operator norm of the direct sum W.
    pub shift_norm: f64,
    /// Operator norm of the approximated pattern operator S.
    pub pattern_norm: f64,
    pub max_mean_norm: f64,
    /// max_l |P_l(W)| <= |W| (1 + 1e-10); holds whenever |S| <= |W|.
    pub shift_bound_ok: bool,
    /// max_l |P_l(W)| <= |S| (1 + 1e-10): the triangular averaging is a
    /// Schur multiplier by a positive kernel with unit diagonal, so this one
    /// is unconditional.
    pub fejer_bound_ok: bool,
    /// Q_l(W) equals S exactly from this l on (the top of a's support).
    pub q_exact_at: usize,
    pub initial_error: f64,
    pub final_error: f64,
    pub monotone: bool,
    pub errors: Vec<f64>,
    pub tol: f64,
    pub converged: bool,
}

/// Cesàro means P_l = (Q_0 + ... + Q_l)/(l+1) of the partial polynomials
/// Q_l(X) = sum a_i X^i, applied to the direct sum W and compared against
/// the shared-pattern operator S = sum a_i W^i on every basis vector.
pub fn cesaro_approximation(
    family: &WeightFamily,
    a: &[Cplx],
    l_max: usize,
    tol: f64,
) -> Result<CesaroReport> {
    let k = family.k();
    if a.is_empty() || a.len() > k + 1 {
        return Err(Error::Invalid(format!(
            "pattern support must lie within 1..={} coefficients",
            k + 1
        )));
    }
    let w = family.direct_sum();
    let d = w.rows();
    let mut powers = Vec::with_capacity(a.len());
    powers.push(Matrix::identity(d));
    for i in 1..a.len() {
        powers.push(powers[i - 1].matmul(&w));
    }
    let mut s = Matrix::zeros(d, d);
    for (i, &ai) in a.iter().enumerate() {
        if ai != Cplx::ZERO {
            s = s.add(&powers[i].scale(ai));
        }
    }
    let shift_norm = family
        .labels()
        .iter()
        .map(|&m| family.shift_matrix(m).unwrap().op_norm())
        .fold(0.0, f64::max);
    let pattern_norm = s.op_norm();
    let q_exact_at = a
        .iter()
        .enumerate()
        .rev()
        .find(|(_, z)| z.norm() > 0.0)
        .map(|(i, _)| i)
        .unwrap_or(0);

    let max_col_err = |p: &Matrix| -> f64 {
        let diff = p.sub(&s);
        (0..d)
            .map(|j| {
                (0..d)
                    .map(|i| diff[(i, j)].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    };

    let mut max_mean_norm = 0.0f64;
    let mut errors = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let mut p = Matrix::zeros(d, d);
        for (i, &ai) in a.iter().enumerate() {
            let weight = 1.0 - (i as f64) / (l as f64 + 1.0);
            if ai != Cplx::ZERO && weight > 0.0 {
                p = p.add(&powers[i].scale(ai * weight));
            }
        }
        max_mean_norm = max_mean_norm.max(p.op_norm());
        errors.push(max_col_err(&p));
    }
    let monotone = errors
        .windows(2)
        .all(|e| e[1] <= e[0] * (1.0 + 1e-12) + 1e-18);
    let initial_error = errors[0];
    let final_error = *errors.last().unwrap();
    Ok(CesaroReport {
        l_max,
        shift_norm,
        pattern_norm,
        max_mean_norm,
        shift_bound_ok: max_mean_norm <= shift_norm * (1.0 + 1e-10),
        fejer_bound_ok: max_mean_norm <= pattern_norm * (1.0 + 1e-10),
        q_exact_at,
        initial_error,
        final_error,
        monotone,
        errors,
        tol,
        converged: final_error <= tol,
    })
}
