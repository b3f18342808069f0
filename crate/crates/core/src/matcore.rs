//! Dense square matrices over the reals and complexes.
//!
//! Everything else in the crate is built on [`Matrix`]: data points, group
//! elements and Lie algebra elements are all `n x n` real matrices, compared
//! with the Frobenius inner product `<a, b> = tr(a^t b)`. Complex matrices
//! ([`CMatrix`]) appear only for the unitary group and are mapped into the
//! real world through the standard `2m x 2m` embedding.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::{Complex64, ComplexFloat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Off-diagonal mass below which a Jacobi sweep is considered converged,
/// relative to the Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Relative eigenvalue separation required of "general" data.
pub const GENERAL_GAP: f64 = 1e-6;
const GENERAL_MAX_DRAWS: usize = 100;

/// Dense real square matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds an `n x n` matrix from row-major entries, rejecting non-finite values.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Contract("matrix size must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract("matrix entries must be finite".into()));
        }
        Ok(Matrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Matrix::from_vec(n, data)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Matrix::from_fn(n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// The single-entry matrix `E_ij`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n);
        m[(i, j)] = 1.0;
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.n).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= rel_tol * scale))
    }

    /// Flat view of the matrix as a vector in `R^{n^2}`.
    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Determinant through LU with partial pivoting.
    pub fn det(&self) -> f64 {
        det_in_place(&mut self.data.clone(), self.n)
    }

    /// Inverse through LU with partial pivoting.
    ///
    /// Fails with [`Error::Singular`] when `|det| <= 1e-12 * ||a||^n`.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let lu = Lu::factor(self)?;
        let threshold = 1e-12 * self.norm().powi(n as i32);
        if lu.det().abs() <= threshold {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    /// Solves `self * x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: b.len(),
            });
        }
        Ok(Lu::factor(self)?.solve(b))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.n, self.n)?;
        for row in self.data.chunks(self.n) {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.add_scaled(-1.0, rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

/// Frobenius inner product `tr(a^t b)`.
pub fn frobenius_inner(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::Dimension {
            expected: a.n,
            found: b.n,
        });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// LU factorisation with partial pivoting of a real square matrix.
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Lu> {
        let n = a.n;
        let mut lu = a.data.clone();
        let (perm, sign) = lu_in_place(&mut lu, n).ok_or(Error::Singular)?;
        Ok(Lu { n, lu, perm, sign })
    }

    pub fn det(&self) -> f64 {
        (0..self.n).map(|i| self.lu[i * self.n + i]).product::<f64>() * self.sign
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[i * n + k] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[i * n + k] * x[k];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

/// In-place Doolittle LU with partial pivoting. Returns the row permutation and
/// its sign, or `None` when an exactly zero pivot column is met.
fn lu_in_place<T: ComplexFloat<Real = f64>>(a: &mut [T], n: usize) -> Option<(Vec<usize>, f64)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            a[i * n + k] = f;
            for j in k + 1..n {
                let t = a[k * n + j];
                a[i * n + j] = a[i * n + j] - f * t;
            }
        }
    }
    Some((perm, sign))
}

/// Determinant of a row-major `n x n` array over `f64` or `Complex64`,
/// destroying the input.
pub fn det_in_place<T: ComplexFloat<Real = f64>>(a: &mut [T], n: usize) -> T {
    match lu_in_place(a, n) {
        None => T::zero(),
        Some((_, sign)) => {
            let mut d = if sign > 0.0 { T::one() } else { -T::one() };
            for i in 0..n {
                d = d * a[i * n + i];
            }
            d
        }
    }
}

/// Orthogonal eigendecomposition `s = q diag(values) q^t` of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub q: Matrix,
    /// Sorted descending; ties keep the order in which Jacobi produced them.
    pub values: Vec<f64>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> Matrix {
        let n = self.q.n;
        let qd = Matrix::from_fn(n, |i, j| self.q[(i, j)] * self.values[j]);
        &qd * &self.q.transpose()
    }

    /// `q diag(f(values)) q^t`.
    pub fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> Matrix {
        let n = self.q.n;
        let mapped: Vec<f64> = self.values.iter().enumerate().map(|(i, &v)| f(i, v)).collect();
        let qd = Matrix::from_fn(n, |i, j| self.q[(i, j)] * mapped[j]);
        &qd * &self.q.transpose()
    }
}

/// Symmetric eigensolver: cyclic Jacobi with a threshold in the first sweeps.
pub fn sym_eig(s: &Matrix) -> Result<EigenDecomposition> {
    if !s.is_symmetric(1e-10) {
        return Err(Error::Contract("sym_eig requires a symmetric matrix".into()));
    }
    let n = s.n;
    let mut a = s.clone();
    // symmetrise exactly so that rotations act on a truly symmetric array
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = Matrix::identity(n);
    let scale = s.norm();
    let target = JACOBI_TOL * scale;

    let mut converged = false;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let q = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition { q, values })
}

/// Smallest gap between consecutive values of a descending list, relative to
/// the largest magnitude.
pub fn min_relative_gap(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    values
        .windows(2)
        .map(|w| (w[0] - w[1]).abs() / scale)
        .fold(f64::INFINITY, f64::min)
}

/// Modified Gram-Schmidt on the columns of `a`, with one reorthogonalisation pass.
pub fn orthonormalize_columns(a: &Matrix) -> Result<Matrix> {
    let n = a.n;
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj: f64 = done[k].iter().zip(&rest[0]).map(|(x, y)| x * y).sum();
                for (c, q) in rest[0].iter_mut().zip(&done[k]) {
                    *c -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Singular);
        }
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    Ok(Matrix::from_fn(n, |i, j| cols[j][i]))
}

/// Seeded "general" data matrix: i.i.d. uniform entries on `[-1, 1]`,
/// redrawn until `det(u) != 0` and the eigenvalues of `u^t u` are pairwise
/// separated by at least [`GENERAL_GAP`] relative.
pub fn random_general(n: usize, seed: u64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::Contract("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERAL_MAX_DRAWS {
        let u = Matrix::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0));
        if u.det().abs() <= 1e-12 {
            continue;
        }
        let eig = sym_eig(&(&u.transpose() * &u))?;
        if n == 1 || min_relative_gap(&eig.values) >= GENERAL_GAP {
            return Ok(u);
        }
    }
    Err(Error::Degenerate(format!(
        "no general {n}x{n} matrix after {GENERAL_MAX_DRAWS} draws"
    )))
}

/// Complex analogue of [`random_general`]: real and imaginary parts i.i.d.
/// uniform on `[-1, 1]`, separated spectrum of `u^* u`.
pub fn random_general_complex(m: usize, seed: u64) -> Result<CMatrix> {
    if m == 0 {
        return Err(Error::Contract("m must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERAL_MAX_DRAWS {
        let data: Vec<Complex64> = (0..m * m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        let u = CMatrix { n: m, data };
        let (values, _) = (&u.adjoint() * &u).herm_eig()?;
        if values.last().copied().unwrap_or(0.0) <= 1e-12 {
            continue;
        }
        if m == 1 || min_relative_gap(&values) >= GENERAL_GAP {
            return Ok(u);
        }
    }
    Err(Error::Degenerate(format!(
        "no general complex {m}x{m} matrix after {GENERAL_MAX_DRAWS} draws"
    )))
}

/// Dense complex square matrix, row-major (real, imaginary) pairs.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn from_parts(re: &Matrix, im: &Matrix) -> Result<Self> {
        if re.n != im.n {
            return Err(Error::Dimension {
                expected: re.n,
                found: im.n,
            });
        }
        let data = re
            .data
            .iter()
            .zip(&im.data)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        Ok(CMatrix { n: re.n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        CMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn re(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(i, j)].re)
    }

    pub fn im(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(i, j)].im)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `sum |z_ij|^2`, the Hermitian Frobenius norm squared.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn det(&self) -> Complex64 {
        det_in_place(&mut self.data.clone(), self.n)
    }

    /// The real `2m x 2m` matrix `[[A, -B], [B, A]]` of `A + iB`.
    pub fn embed(&self) -> Matrix {
        let m = self.n;
        Matrix::from_fn(2 * m, |i, j| {
            let z = self[(i % m, j % m)];
            match (i < m, j < m) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        })
    }

    /// Orthogonal projection of a real `2m x 2m` matrix onto the complex-linear maps.
    pub fn project_embedded(a: &Matrix) -> Result<CMatrix> {
        if a.n % 2 != 0 {
            return Err(Error::Contract("embedded matrix must have even size".into()));
        }
        let m = a.n / 2;
        Ok(CMatrix::from_fn(m, |i, j| {
            let re = 0.5 * (a[(i, j)] + a[(i + m, j + m)]);
            let im = 0.5 * (a[(i + m, j)] - a[(i, j + m)]);
            Complex64::new(re, im)
        }))
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.data.iter().fold(f64::MIN_POSITIVE, |m, z| m.max(z.norm()));
        (0..self.n).all(|i| {
            (0..=i).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= rel_tol * scale)
        })
    }

    /// Eigendecomposition of a Hermitian matrix through the real embedding.
    ///
    /// Returns the eigenvalues (descending) and a unitary matrix whose columns
    /// are the matching eigenvectors. Each eigenvalue of the embedding is
    /// doubled; every other eigenvector is taken and read back as a complex
    /// vector, which is valid because the doubled eigenspace is the complex
    /// line of that vector.
    pub fn herm_eig(&self) -> Result<(Vec<f64>, CMatrix)> {
        if !self.is_hermitian(1e-10) {
            return Err(Error::Contract("herm_eig requires a Hermitian matrix".into()));
        }
        let m = self.n;
        let eig = sym_eig(&self.embed())?;
        let values: Vec<f64> = (0..m).map(|k| eig.values[2 * k]).collect();
        let mut vecs = CMatrix::from_fn(m, |_, _| Complex64::new(0.0, 0.0));
        for k in 0..m {
            let col = eig.q.column(2 * k);
            for i in 0..m {
                vecs[(i, k)] = Complex64::new(col[i], col[i + m]);
            }
        }
        Ok((values, vecs))
    }

    pub fn scale_columns(&self, factors: &[Complex64]) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self[(i, j)] * factors[j])
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.n, self.n)?;
        for row in self.data.chunks(self.n) {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        CMatrix::from_fn(self.n, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        CMatrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

/// On-disk matrix format: `{"n", "data"}` for real matrices and
/// `{"n", "re", "im"}` for complex ones, rows outermost.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixFile {
    Complex {
        n: usize,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
    Real {
        n: usize,
        data: Vec<Vec<f64>>,
    },
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<MatrixFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn checked_rows(n: usize, rows: &[Vec<f64>]) -> Result<Matrix> {
        if rows.len() != n {
            return Err(Error::Parse(format!(
                "declared n = {n} but found {} rows",
                rows.len()
            )));
        }
        Matrix::from_rows(rows).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn into_real(self) -> Result<Matrix> {
        match self {
            MatrixFile::Real { n, data } => Self::checked_rows(n, &data),
            MatrixFile::Complex { .. } => {
                Err(Error::Parse("expected a real matrix, found re/im".into()))
            }
        }
    }

    /// Real files are accepted as complex matrices with zero imaginary part.
    pub fn into_complex(self) -> Result<CMatrix> {
        match self {
            MatrixFile::Real { n, data } => {
                let re = Self::checked_rows(n, &data)?;
                CMatrix::from_parts(&re, &Matrix::zeros(n))
            }
            MatrixFile::Complex { n, re, im } => {
                let re = Self::checked_rows(n, &re)?;
                let im = Self::checked_rows(n, &im)?;
                CMatrix::from_parts(&re, &im)
            }
        }
    }

    pub fn from_real(m: &Matrix) -> MatrixFile {
        MatrixFile::Real {
            n: m.n(),
            data: m.rows(),
        }
    }

    pub fn from_complex(m: &CMatrix) -> MatrixFile {
        MatrixFile::Complex {
            n: m.n(),
            re: m.re().rows(),
            im: m.im().rows(),
        }
    }
}
