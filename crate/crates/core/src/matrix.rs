//! Dense matrices with an exact-rational or floating-point backend.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Arithmetic used for rank, determinant and kernel computations.
///
/// `Exact` is only possible when every entry is rational. `Float` carries an
/// optional absolute singular-value threshold; `None` selects
/// `max(rows, cols) * eps * sigma_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    Exact,
    Float { tol: Option<f64> },
}

impl Backend {
    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Exact)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
    backend: Backend,
}

impl Matrix {
    /// Row-major constructor. The backend is exact iff every entry is rational.
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{}", entries.len()),
            });
        }
        let backend = if entries.iter().all(Scalar::is_exact) {
            Backend::Exact
        } else {
            Backend::Float { tol: None }
        };
        Ok(Matrix { rows, cols, entries, backend })
    }

    pub fn from_rows(grid: Vec<Vec<Scalar>>) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|r| r.len() != cols) {
            return Err(Error::Ragged);
        }
        Self::new(rows, cols, grid.into_iter().flatten().collect())
    }

    /// Integer matrix from literal rows, mainly for fixtures.
    pub fn from_ints<R: AsRef<[i64]>>(grid: &[R]) -> Self {
        let rows = grid.iter().map(|r| r.as_ref().iter().map(|&v| Scalar::int(v)).collect()).collect();
        Self::from_rows(rows).expect("rectangular integer grid")
    }

    /// Float-backend matrix from row-major data.
    pub fn from_f64(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix {
            rows,
            cols,
            entries: data.into_iter().map(Scalar::Float).collect(),
            backend: Backend::Float { tol: None },
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Scalar::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Scalar::one();
        }
        Matrix { rows: n, cols: n, entries, backend: Backend::Exact }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![Scalar::zero(); rows * cols], backend: Backend::Exact }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Demotes to the float backend with the given absolute tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.backend = Backend::Float { tol: Some(tol.abs()) };
        self
    }

    /// Demotes to the float backend with the default tolerance.
    pub fn into_float(mut self) -> Self {
        if self.backend.is_exact() {
            self.backend = Backend::Float { tol: None };
        }
        self
    }

    /// Switches backend. Requesting `Exact` fails unless all entries are rational.
    pub fn with_backend(mut self, backend: Backend) -> Result<Self> {
        if backend.is_exact() && !self.entries.iter().all(Scalar::is_exact) {
            return Err(Error::InvalidParameter("exact backend requires rational entries".into()));
        }
        self.backend = backend;
        Ok(self)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, entries, backend: self.backend }
    }

    /// Rows and columns restricted to the given (0-based) index lists, in order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::IndexOutOfRange { index: i, bound: self.rows });
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange { index: j, bound: self.cols });
        }
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                entries.push(self.get(i, j).clone());
            }
        }
        Ok(Matrix { rows: rows.len(), cols: cols.len(), entries, backend: self.backend })
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let (a, b) = (self.get(i, j), self.get(j, i));
                let same = match (self.backend, a, b) {
                    (Backend::Exact, _, _) => a == b,
                    _ => libm::fabs(a.to_f64() - b.to_f64()) <= 1e-12,
                };
                if !same {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64())
    }

    pub(crate) fn to_rational(&self) -> Option<Dense<BigRational>> {
        let data = self.entries.iter().map(|s| s.as_rational().cloned()).collect::<Option<Vec<_>>>()?;
        Some(Dense::from_vec(self.rows, self.cols, data))
    }

    pub(crate) fn to_dense_f64(&self) -> Dense<f64> {
        Dense::from_vec(self.rows, self.cols, self.entries.iter().map(Scalar::to_f64).collect())
    }

    pub(crate) fn from_dense_rational(d: Dense<BigRational>) -> Self {
        Matrix {
            rows: d.rows,
            cols: d.cols,
            entries: d.data.into_iter().map(Scalar::Rational).collect(),
            backend: Backend::Exact,
        }
    }

    pub(crate) fn from_dense_f64(d: Dense<f64>, tol: Option<f64>) -> Self {
        Matrix {
            rows: d.rows,
            cols: d.cols,
            entries: d.data.into_iter().map(Scalar::Float).collect(),
            backend: Backend::Float { tol },
        }
    }

    /// Product on the exact backend when both factors are exact, else in floats.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{}", rhs.rows),
            });
        }
        if self.backend.is_exact() && rhs.backend.is_exact() {
            if let (Some(a), Some(b)) = (self.to_rational(), rhs.to_rational()) {
                return Ok(Self::from_dense_rational(a.mul(&b)));
            }
        }
        let tol = match (self.backend, rhs.backend) {
            (Backend::Float { tol: Some(t) }, _) | (_, Backend::Float { tol: Some(t) }) => Some(t),
            _ => None,
        };
        Ok(Self::from_dense_f64(self.to_dense_f64().mul(&rhs.to_dense_f64()), tol))
    }

    /// Absolute singular-value threshold for the float backend.
    fn float_threshold(&self, sigma_max: f64) -> f64 {
        match self.backend {
            Backend::Float { tol: Some(t) } => t,
            _ => self.rows.max(self.cols) as f64 * f64::EPSILON * sigma_max,
        }
    }

    /// Exact rank by fraction-free elimination, or numerical rank.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        match self.to_rational().filter(|_| self.backend.is_exact()) {
            Some(q) => bareiss(integer_rows(&q).0).rank,
            None => {
                let sv = self.to_dmatrix().singular_values();
                let sigma_max = sv.iter().copied().fold(0.0, f64::max);
                let tau = self.float_threshold(sigma_max);
                sv.iter().filter(|&&s| s > tau).count()
            }
        }
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if self.rows == 0 {
            return Ok(Scalar::one());
        }
        match self.to_rational().filter(|_| self.backend.is_exact()) {
            Some(q) => {
                let (ints, scale) = integer_rows(&q);
                let elim = bareiss(ints);
                Ok(Scalar::Rational(BigRational::new(elim.determinant, scale)))
            }
            None => Ok(Scalar::Float(self.to_dmatrix().determinant())),
        }
    }

    /// Basis of the right kernel; empty iff the matrix has full column rank.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        if self.cols == 0 {
            return Vec::new();
        }
        if let Some(q) = self.to_rational().filter(|_| self.backend.is_exact()) {
            return q
                .nullspace(0.0)
                .into_iter()
                .map(|v| v.into_iter().map(Scalar::Rational).collect())
                .collect();
        }
        // Pad with zero rows so the SVD returns a full right basis.
        let m = self.to_dmatrix();
        let dim = self.cols.max(self.rows);
        let mut padded = DMatrix::zeros(dim, self.cols);
        padded.view_mut((0, 0), (self.rows, self.cols)).copy_from(&m);
        let svd = padded.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let tau = self.float_threshold(sigma_max);
        let mut basis = Vec::new();
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= tau {
                basis.push(v_t.row(k).iter().map(|&x| Scalar::Float(x)).collect());
            }
        }
        basis
    }
}

/// Clears denominators row by row; returns the integer rows and the product
/// of the row scale factors.
fn integer_rows(q: &Dense<BigRational>) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale_product = BigInt::one();
    let rows = (0..q.rows)
        .map(|i| {
            let row = q.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale_product *= &lcm;
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    (rows, scale_product)
}

struct Elimination {
    rank: usize,
    /// Determinant when the input is square; zero if singular.
    determinant: BigInt,
}

/// Bareiss fraction-free elimination. Every intermediate entry is a minor of
/// the input, so the divisions by the previous pivot are exact.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> Elimination {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut negate = false;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            negate = !negate;
        }
        let (head, tail) = m.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            for j in (c + 1)..cols {
                let v = (&pivot_row[c] * &row[j] - &row[c] * &pivot_row[j]) / &prev;
                row[j] = v;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    let determinant = if rows == cols && r == rows {
        if negate {
            -prev
        } else {
            prev
        }
    } else {
        BigInt::zero()
    };
    Elimination { rank: r, determinant }
}

/// Symmetric square root by eigendecomposition.
pub fn sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_power(m, libm::sqrt)
}

/// Inverse symmetric square root, `M^{-1/2}`.
pub fn inverse_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_power(m, |x| 1.0 / libm::sqrt(x))
}

fn spd_power(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (m - m.transpose()).amax() > 1e-10 * scale {
        return Err(Error::NotSymmetric);
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let largest = eig.eigenvalues.amax();
    let tol = m.nrows() as f64 * f64::EPSILON * largest;
    if eig.eigenvalues.iter().any(|&l| l <= tol) {
        return Err(Error::NotPositiveDefinite);
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    let v = &eig.eigenvectors;
    let out = v * d * v.transpose();
    Ok((&out + out.transpose()) * 0.5)
}

/// The bosonic symplectic form `[[0, I], [-I, 0]]` in grouped ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    pub n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        SymplecticForm { n }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if j == i + n {
                1.0
            } else if i == j + n {
                -1.0
            } else {
                0.0
            }
        })
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.n;
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m.entries[i * 2 * n + i + n] = Scalar::one();
            m.entries[(i + n) * 2 * n + i] = Scalar::int(-1);
        }
        m
    }

    /// `S Ω Sᵀ = Ω` up to an absolute entrywise tolerance.
    pub fn preserved_by(&self, s: &DMatrix<f64>, tol: f64) -> bool {
        let omega = self.to_dmatrix();
        s.shape() == omega.shape() && (s * &omega * s.transpose() - omega).amax() <= tol
    }
}

/// Sign of a rational determinant, used by total-positivity tests.
pub(crate) fn is_positive(s: &Scalar) -> bool {
    match s {
        Scalar::Rational(q) => q.is_positive(),
        other => other.to_f64() > 0.0,
    }
}
