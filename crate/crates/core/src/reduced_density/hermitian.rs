//! Dense complex matrices and the Hermitian eigensolver.
//!
//! The solver reduces the matrix to real symmetric tridiagonal form with
//! Householder reflections, then diagonalizes with implicit-shift QL sweeps
//! (Givens rotations). Off-diagonal elements deflate once they fall below
//! [`CONVERGENCE_THRESHOLD`] relative to their neighbouring diagonal.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative deflation threshold of the QL iteration.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-12;

/// Largest `|M_ij - conj(M_ji)|` accepted as Hermitian input.
pub const HERMITIAN_INPUT_TOLERANCE: f64 = 1e-10;

const MAX_QL_ITERATIONS: usize = 60;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Row-major data; `data.len()` must be a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() {
            return Err(Error::domain(format!(
                "{} entries do not form a square matrix",
                data.len()
            )));
        }
        Ok(CMatrix { dim, data })
    }

    /// `weight * |psi><psi|`.
    pub fn outer(psi: &[Complex64], weight: f64) -> Self {
        let dim = psi.len();
        Self::from_fn(dim, |i, j| psi[i] * psi[j].conj() * weight)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self + other`; panics on dimension mismatch.
    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim, "vector length mismatch");
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Sum of `|M_ij|` over all entries.
    pub fn l1_norm(&self) -> f64 {
        compensated_sum(self.data.iter().map(|z| z.norm()))
    }

    /// Sum of `|M_ij|` over `i != j`.
    pub fn off_diagonal_l1(&self) -> f64 {
        let dim = self.dim;
        compensated_sum(
            self.data
                .iter()
                .enumerate()
                .filter(|(idx, _)| idx / dim != idx % dim)
                .map(|(_, z)| z.norm()),
        )
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Whether `self + shift * I` admits a Cholesky factorization, i.e. the
    /// smallest eigenvalue of a Hermitian `self` is above `-shift`.
    pub fn is_bounded_below(&self, shift: f64) -> bool {
        let n = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut pivot = self[(j, j)].re + shift;
            for k in 0..j {
                pivot -= l[j * n + k].norm_sqr();
            }
            if pivot <= 0.0 || !pivot.is_finite() {
                return false;
            }
            let pivot = pivot.sqrt();
            l[j * n + j] = Complex64::new(pivot, 0.0);
            for i in j + 1..n {
                let mut acc = self[(i, j)];
                for k in 0..j {
                    acc -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = acc / pivot;
            }
        }
        true
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Eigenvalues (descending) and eigenvectors (as columns, same order).
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Real spectrum of a Hermitian matrix, sorted descending.
pub fn eigenvalues_hermitian(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(decompose(m, false)?.values)
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigh(m: &CMatrix) -> Result<HermitianEigen> {
    decompose(m, true)
}

fn decompose(m: &CMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_INPUT_TOLERANCE {
        return Err(Error::domain(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let n = m.dim();
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: CMatrix::zeros(0),
        });
    }
    let (mut diag, mut off, mut z) = tridiagonalize(m, want_vectors);
    ql_implicit(&mut diag, &mut off, z.as_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = match z {
        Some(z) => CMatrix::from_fn(n, |i, j| z[(i, order[j])]),
        None => CMatrix::zeros(0),
    };
    Ok(HermitianEigen { values, vectors })
}

/// Householder reduction `A = Z T Z^H` with `T` real symmetric tridiagonal.
/// Returns `(diag(T), offdiag(T), Z)`; `offdiag[i]` couples `i` and `i + 1`.
fn tridiagonalize(m: &CMatrix, want_vectors: bool) -> (Vec<f64>, Vec<f64>, Option<CMatrix>) {
    let n = m.dim();
    let mut a = m.clone();
    // Symmetrize so rounding in the input cannot leak into the reflections.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut q = want_vectors.then(|| CMatrix::identity(n));

    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        let off = k + 1;
        let len = n - off;

        // p = A v over the trailing block, K = v^H p, w = p - K v,
        // A <- A - 2 v w^H - 2 w v^H.
        let p: Vec<Complex64> = (0..len)
            .map(|i| (0..len).map(|j| a[(off + i, off + j)] * v[j]).sum())
            .collect();
        let kappa: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa.re * vi).collect();
        for i in 0..len {
            for j in 0..len {
                a[(off + i, off + j)] -= 2.0 * (v[i] * w[j].conj() + w[i] * v[j].conj());
            }
        }
        a[(off, k)] = alpha;
        a[(k, off)] = alpha.conj();
        for i in off + 1..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
            a[(k, i)] = Complex64::new(0.0, 0.0);
        }
        if let Some(q) = q.as_mut() {
            // Q <- Q (I - 2 v v^H)
            for r in 0..n {
                let dot: Complex64 = (0..len).map(|j| q[(r, off + j)] * v[j]).sum();
                for j in 0..len {
                    q[(r, off + j)] -= 2.0 * dot * v[j].conj();
                }
            }
        }
    }

    // Rotate the complex subdiagonal onto the positive reals: T = D^H A D.
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut offdiag = vec![0.0; n];
    let mut phase = Complex64::new(1.0, 0.0);
    let mut phases = vec![phase; n];
    for i in 0..n.saturating_sub(1) {
        let e = a[(i + 1, i)];
        offdiag[i] = e.norm();
        if offdiag[i] > 0.0 {
            phase *= e / offdiag[i];
        }
        phases[i + 1] = phase;
    }
    let z = q.map(|q| CMatrix::from_fn(n, |r, c| q[(r, c)] * phases[c]));
    (diag, offdiag, z)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating the
/// rotations into the columns of `z`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut CMatrix>) -> Result<()> {
    let n = d.len();
    // Absolute floor for deflation, so that round-off couplings between
    // (numerically) zero eigenvalues still split off.
    let norm = (0..n).map(|i| d[i].abs() + e[i].abs()).fold(0.0, f64::max);
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= CONVERGENCE_THRESHOLD * scale || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::internal("Hermitian eigensolver failed to converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[(k, i + 1)];
                        z[(k, i + 1)] = z[(k, i)] * s + f * c;
                        z[(k, i)] = z[(k, i)] * c - f * s;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
