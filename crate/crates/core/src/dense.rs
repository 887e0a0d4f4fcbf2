//! Row-major dense matrices over a field, with reduced row echelon form.
//!
//! The same elimination code serves exact rationals and `f64`; the float
//! instance treats entries at or below a caller-supplied tolerance as zero.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::rational_to_f64;

pub(crate) trait Field:
    Clone
    + PartialEq
    + core::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn negligible(&self, tol: f64) -> bool;
    fn magnitude(&self) -> f64;
}

impl Field for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.abs())
    }
}

impl Field for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn negligible(&self, tol: f64) -> bool {
        libm::fabs(*self) <= tol
    }
    fn magnitude(&self) -> f64 {
        libm::fabs(*self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dense<F> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

pub(crate) struct Rref<F> {
    pub reduced: Dense<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Dense<F> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Dense { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.push(self.get(i, j).clone());
            }
        }
        Dense::from_vec(self.cols, self.rows, t)
    }

    pub fn mul(&self, rhs: &Dense<F>) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.negligible(0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).clone() + a.clone() * rhs.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut d = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                d.push(self.get(i, j).clone());
            }
        }
        Dense::from_vec(rows.len(), cols.len(), d)
    }

    pub fn hstack(&self, rhs: &Dense<F>) -> Self {
        assert_eq!(self.rows, rhs.rows);
        let mut d = Vec::with_capacity(self.data.len() + rhs.data.len());
        for i in 0..self.rows {
            d.extend_from_slice(self.row(i));
            d.extend_from_slice(rhs.row(i));
        }
        Dense::from_vec(self.rows, self.cols + rhs.cols, d)
    }

    pub fn vstack(&self, rhs: &Dense<F>) -> Self {
        assert_eq!(self.cols, rhs.cols);
        let mut d = self.data.clone();
        d.extend_from_slice(&rhs.data);
        Dense::from_vec(self.rows + rhs.rows, self.cols, d)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Reduced row echelon form. Exact fields take the first nonzero pivot
    /// in each column; floats take the largest-magnitude one.
    pub fn rref(&self, tol: f64) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let candidate = if F::EXACT {
                (r..m.rows).find(|&i| !m.get(i, c).negligible(tol))
            } else {
                (r..m.rows)
                    .filter(|&i| !m.get(i, c).negligible(tol))
                    .max_by(|&a, &b| m.get(a, c).magnitude().total_cmp(&m.get(b, c).magnitude()))
            };
            let Some(p) = candidate else {
                for i in r..m.rows {
                    m.set(i, c, F::zero());
                }
                continue;
            };
            m.swap_rows(r, p);
            let inv = F::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            let pivot_row: Vec<F> = m.row(r).to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.negligible(0.0) {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * pivot_row[j].clone();
                    m.set(i, j, v);
                }
                m.set(i, c, F::zero());
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: m, pivots }
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).pivots.len()
    }

    /// Basis of the right kernel, one vector per non-pivot column.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<F>> {
        let Rref { reduced, pivots } = self.rref(tol);
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -reduced.get(i, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self, tol: f64) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let Rref { reduced, pivots } = self.hstack(&Self::identity(n)).rref(tol);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(reduced.select(&rows, &cols))
    }
}
