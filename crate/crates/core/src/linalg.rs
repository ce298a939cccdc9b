//! Dense complex linear algebra for small Hermitian matrices.
//!
//! Everything here is sized for desk-scale quantum states (d up to a few
//! dozen). The eigensolver is a cyclic complex Jacobi iteration with a fixed
//! sweep order, so identical inputs always produce bit-identical spectra.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance on `|a_jk - conj(a_kj)|` accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Off-diagonal Frobenius norm at which the Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Fails if the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(CMatrix { rows: n, cols: m, data })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [C64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * other[(i % r2, j % c2)])
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|a_jk - conj(a_kj)|`; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in j..n {
                worst = worst.max((self[(j, k)] - self[(k, j)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A†)/2`, with an exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        let mut h = Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        for i in 0..self.rows {
            h[(i, i)].im = 0.0;
        }
        h
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Square complex matrix equal to its own adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity within [`HERMITIAN_TOL`] and stores the exact
    /// Hermitian part.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare(m.rows, m.cols));
        }
        if m.rows == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if !m.is_finite() {
            return Err(Error::Malformed("matrix has non-finite entries".into()));
        }
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(HermitianMatrix(m.hermitian_part()))
    }

    /// Wraps a matrix known to be Hermitian up to rounding; symmetrizes it.
    pub(crate) fn from_hermitian_unchecked(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        HermitianMatrix(m.hermitian_part())
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        HermitianMatrix(CMatrix::diag_real(values))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr(self · other)`, real for Hermitian pairs.
    pub fn trace_product(&self, other: &CMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.0[(i, j)] * other[(j, i)]).re;
            }
        }
        acc
    }

    /// `<v|H|v>`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let hv = self.0.matvec(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(&self.0 - &other.0)
    }

    /// `A self A†`, Hermitian for any `A`.
    pub fn congruence(&self, a: &CMatrix) -> Self {
        HermitianMatrix::from_hermitian_unchecked(a.matmul(&self.0).matmul(&a.adjoint()))
    }

    pub fn kron(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(self.0.kron(&other.0))
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector paired with `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `U f(Λ) U†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let u = &self.eigenvectors;
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * vals[k] * u[(j, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| l)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back in descending order. Ties keep the order in which
/// the Jacobi iteration produced them, and each eigenvector is rotated so its
/// first largest-modulus entry is real and nonnegative.
pub fn eigh(h: &HermitianMatrix) -> Spectrum {
    let n = h.dim();
    let mut a = h.0.clone();
    let mut v = CMatrix::identity(n);
    jacobi_diagonalize(&mut a, Some(&mut v));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut column = v.column(src);
        fix_phase(&mut column);
        for (r, z) in column.into_iter().enumerate() {
            vecs[(r, col)] = z;
        }
    }
    Spectrum { eigenvalues, eigenvectors: vecs }
}

/// Eigenvalues only, sorted descending. Closed form for d ≤ 2.
pub fn eigvalsh(h: &HermitianMatrix) -> Vec<f64> {
    hermitian_eigenvalues(&h.0)
}

/// Eigenvalues of a matrix assumed Hermitian (only the upper triangle and the
/// real diagonal are read for d ≤ 2). Sorted descending.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    match m.rows {
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = m[(0, 1)].norm();
            let mean = 0.5 * (a + d);
            let rad = (0.5 * (a - d)).hypot(b);
            vec![mean + rad, mean - rad]
        }
        _ => {
            let mut a = m.clone();
            jacobi_diagonalize(&mut a, None);
            let mut vals: Vec<f64> = (0..m.rows).map(|i| a[(i, i)].re).collect();
            vals.sort_by(|x, y| y.total_cmp(x));
            vals
        }
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_diagonalize(a: &mut CMatrix, mut v: Option<&mut CMatrix>) {
    let n = a.rows;
    let scale = a.frobenius_norm().max(1.0);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let beta = apq.norm();
                if beta < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Real rotation for [[app, beta], [beta, aqq]], then undo the
                // phase of a_pq: G = diag(1, e^{-i alpha}) * [[c, s], [-s, c]].
                let theta = (aqq - app) / (2.0 * beta);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let phase = (apq / beta).conj();
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = phase * (-s);
                let g_qq = phase * c;

                // A <- A G
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * g_pp + arq * g_qp;
                    a[(r, q)] = arp * g_pq + arq * g_qq;
                }
                // A <- G† A
                for col in 0..n {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = g_pp.conj() * apc + g_qp.conj() * aqc;
                    a[(q, col)] = g_pq.conj() * apc + g_qq.conj() * aqc;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;

                if let Some(v) = v.as_deref_mut() {
                    for r in 0..n {
                        let vrp = v[(r, p)];
                        let vrq = v[(r, q)];
                        v[(r, p)] = vrp * g_pp + vrq * g_qp;
                        v[(r, q)] = vrp * g_pq + vrq * g_qq;
                    }
                }
            }
        }
    }
}

fn fix_phase(column: &mut [C64]) {
    let max = column.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = column.iter().position(|z| z.norm() >= max * (1.0 - 1e-12)).unwrap_or(0);
    let ph = column[pivot] / column[pivot].norm();
    let rot = ph.conj();
    for z in column.iter_mut() {
        *z *= rot;
    }
    column[pivot] = C64::new(column[pivot].norm(), 0.0);
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(a: &HermitianMatrix) -> f64 {
    eigvalsh(a).iter().map(|l| l.abs()).sum()
}

/// Largest absolute eigenvalue.
pub fn op_norm(a: &HermitianMatrix) -> f64 {
    eigvalsh(a).iter().map(|l| l.abs()).fold(0.0, f64::max)
}

/// Which tensor factor [`partial_trace`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Traces out one factor of an operator on `C^{dA} ⊗ C^{dB}`.
pub fn partial_trace(w: &HermitianMatrix, dims: (usize, usize), keep: Side) -> Result<HermitianMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 {
        return Err(Error::InvalidParameter("subsystem dimensions must be positive".into()));
    }
    if w.dim() != da * db {
        return Err(Error::DimensionMismatch { expected: da * db, got: w.dim() });
    }
    let m = &w.0;
    let out = match keep {
        Side::A => CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Side::B => CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    };
    Ok(HermitianMatrix::from_hermitian_unchecked(out))
}

/// Reduced state `M M†` of the pure state whose amplitudes, reshaped row-major
/// into a `dA × dB` matrix `M`, are `psi`. Keeps factor A.
pub(crate) fn reduced_from_amplitudes(psi: &[C64], da: usize, db: usize) -> CMatrix {
    debug_assert_eq!(psi.len(), da * db);
    let mut out = CMatrix::zeros(da, da);
    for i in 0..da {
        let ri = &psi[i * db..(i + 1) * db];
        for j in i..da {
            let rj = &psi[j * db..(j + 1) * db];
            let z: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
            out[(i, j)] = z;
            out[(j, i)] = z.conj();
        }
        out[(i, i)].im = 0.0;
    }
    out
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        HermitianMatrix::from_hermitian_unchecked(m)
    }

    #[test]
    fn identity_spectrum() {
        let s = eigh(&HermitianMatrix::identity(2));
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_keeps_standard_basis() {
        let s = eigh(&HermitianMatrix::from_real_diagonal(&[0.7, 0.3]));
        assert_eq!(s.eigenvalues, vec![0.7, 0.3]);
        assert_eq!(s.eigenvectors, CMatrix::identity(2));
        let s = eigh(&HermitianMatrix::from_real_diagonal(&[0.3, 0.7]));
        assert_eq!(s.eigenvalues, vec![0.7, 0.3]);
        assert_eq!(s.eigenvector(0), vec![ZERO, ONE]);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 6, 9] {
            for _ in 0..20 {
                let h = random_hermitian(n, &mut rng);
                let s = eigh(&h);
                assert!(s.reconstruct().max_abs_diff(h.matrix()) < 1e-10);
                let u = &s.eigenvectors;
                let gram = u.adjoint().matmul(u);
                assert!(gram.max_abs_diff(&CMatrix::identity(n)) < 1e-10);
                assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
                let sum: f64 = s.eigenvalues.iter().sum();
                assert!((sum - h.trace()).abs() < 1e-10);
                let fast = eigvalsh(&h);
                for (a, b) in fast.iter().zip(&s.eigenvalues) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn eigh_is_deterministic_and_phase_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(5, &mut rng);
        let a = eigh(&h);
        let b = eigh(&h.clone());
        assert_eq!(a, b);
        for k in 0..5 {
            let col = a.eigenvector(k);
            let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = col.iter().find(|z| z.norm() >= max * (1.0 - 1e-12)).unwrap();
            assert_eq!(pivot.im, 0.0);
            assert!(pivot.re >= 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(_))));
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotSquare(2, 3))));
    }

    #[test]
    fn norms_on_simple_inputs() {
        let h = HermitianMatrix::from_real_diagonal(&[0.6, -0.4]);
        assert!((trace_norm(&h) - 1.0).abs() < 1e-15);
        assert_eq!(op_norm(&HermitianMatrix::identity(4)), 1.0);
        assert!((op_norm(&HermitianMatrix::from_real_diagonal(&[0.1, -0.1])) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn partial_trace_product_and_bell() {
        let rho = HermitianMatrix::from_real_diagonal(&[0.25, 0.75]);
        let sigma = HermitianMatrix::from_real_diagonal(&[0.1, 0.2, 0.7]);
        let w = rho.kron(&sigma);
        let a = partial_trace(&w, (2, 3), Side::A).unwrap();
        assert!(a.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let b = partial_trace(&w, (2, 3), Side::B).unwrap();
        assert!(b.matrix().max_abs_diff(sigma.matrix()) < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let bell = HermitianMatrix::new(CMatrix::outer(&phi, &phi)).unwrap();
        let red = partial_trace(&bell, (2, 2), Side::A).unwrap();
        assert!(red.matrix().max_abs_diff(&CMatrix::identity(2).scale(0.5)) < 1e-15);
        assert!(partial_trace(&bell, (3, 2), Side::A).is_err());
    }

    #[test]
    fn reduced_from_amplitudes_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi: Vec<C64> = (0..6).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let w = HermitianMatrix::new(CMatrix::outer(&psi, &psi)).unwrap();
        let a = partial_trace(&w, (2, 3), Side::A).unwrap();
        assert!(reduced_from_amplitudes(&psi, 2, 3).max_abs_diff(a.matrix()) < 1e-14);
    }
}
