//! Dense complex matrices, just large enough for the truncated operator
//! computations: products, nullspace bases via row reduction, and operator
//! norms via power iteration on A*A.

use crate::Cplx;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    /// Row-major.
    data: Vec<Cplx>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Cplx::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Cplx::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Cplx) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Cplx::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, z: Cplx) -> Matrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= z;
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn apply(&self, v: &[Cplx]) -> Vec<Cplx> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Orthonormal basis of the (numerical) nullspace, as column vectors.
    /// Pivots are declared against `rel_tol` times the largest entry seen
    /// during elimination, so the rank decision scales with the data.
    pub fn nullspace(&self, rel_tol: f64) -> Vec<Vec<Cplx>> {
        let mut a = self.clone();
        let scale = a.max_abs().max(1.0);
        let tol = rel_tol * scale;
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            // partial pivoting on the column
            let (mut best_row, mut best_val) = (r, 0.0);
            for i in r..a.rows {
                let v = a[(i, c)].norm();
                if v > best_val {
                    best_row = i;
                    best_val = v;
                }
            }
            if best_val <= tol {
                continue;
            }
            a.swap_rows(r, best_row);
            let inv = Cplx::ONE / a[(r, c)];
            for j in c..a.cols {
                a[(r, j)] *= inv;
            }
            for i in 0..a.rows {
                if i == r {
                    continue;
                }
                let f = a[(i, c)];
                if f == Cplx::ZERO {
                    continue;
                }
                for j in c..a.cols {
                    let sub = f * a[(r, j)];
                    a[(i, j)] -= sub;
                }
            }
            pivot_cols.push(c);
            r += 1;
            if r == a.rows {
                break;
            }
        }
        let mut basis = Vec::new();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; a.cols];
            for &c in &pivot_cols {
                s[c] = true;
            }
            s
        };
        for free in 0..a.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![Cplx::ZERO; a.cols];
            v[free] = Cplx::ONE;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[(row, free)];
            }
            basis.push(v);
        }
        // Gram-Schmidt for a cleaner basis
        orthonormalize(&mut basis);
        basis
    }

    /// Largest singular value, via power iteration on A*A.
    pub fn op_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let ata = self.adjoint().matmul(self);
        let n = ata.cols;
        // deterministic start with nonzero overlap against any eigenvector
        let mut v: Vec<Cplx> = (0..n)
            .map(|j| Cplx::new(1.0 + (j as f64 * 0.7).sin(), (j as f64 * 0.3).cos()))
            .collect();
        normalize(&mut v);
        let mut lambda = 0.0f64;
        for _ in 0..500 {
            let mut w = ata.apply(&v);
            let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            for z in w.iter_mut() {
                *z /= norm;
            }
            let next = norm;
            v = w;
            if (next - lambda).abs() <= 1e-14 * next.max(1.0) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Cplx;
    fn index(&self, (i, j): (usize, usize)) -> &Cplx {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cplx {
        &mut self.data[i * self.cols + j]
    }
}

fn normalize(v: &mut [Cplx]) {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

fn orthonormalize(basis: &mut Vec<Vec<Cplx>>) {
    let mut out: Vec<Vec<Cplx>> = Vec::new();
    for mut v in basis.drain(..) {
        for u in &out {
            let proj: Cplx = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            for z in v.iter_mut() {
                *z /= n;
            }
            out.push(v);
        }
    }
    *basis = out;
}
