//! Analog stabilizer states `H = (A | -B)`, their reduction to cluster form,
//! and nullifiers supported on a subset of modes.
//!
//! Column `j < n` of `H` is the coefficient of `x_j`, column `n + j` that of
//! `p_j`. All stabilizer phases are taken to be one.

use alloc::format;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::dense::{Dense, Field};
use crate::error::{Error, Result};
use crate::families::{AdjacencyMatrix, GeneratorMatrix};
use crate::matrix::{Backend, Matrix};
use crate::scalar::Scalar;
use crate::subsets::{complement, Combinations};
use crate::uniformity::{max_uniformity, UniformityReport};

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerGenerators {
    n: usize,
    h: Matrix,
}

/// One step taken while bringing a stabilizer state to cluster form.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalOp {
    /// Left multiplication of `H` by an invertible matrix. This only changes
    /// the presentation; the state is untouched.
    RowBasisChange(Matrix),
    /// Single-mode Fourier transform (`x -> p`, `p -> -x`) on each listed mode.
    Fourier(Vec<usize>),
}

pub type LocalOpLog = Vec<LocalOp>;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterForm {
    pub adjacency: AdjacencyMatrix,
    pub log: LocalOpLog,
}

impl ClusterForm {
    /// Modes that received a Fourier transform.
    pub fn fourier_modes(&self) -> Vec<usize> {
        self.log
            .iter()
            .filter_map(|op| match op {
                LocalOp::Fourier(m) => Some(m.clone()),
                LocalOp::RowBasisChange(_) => None,
            })
            .flatten()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalNullifier {
    /// Combination `r` of the rows of `H`.
    pub coefficients: Vec<Scalar>,
    /// The nullifier `r H`, length `2n`.
    pub nullifier: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerReport {
    pub report: UniformityReport,
    pub cluster: ClusterForm,
}

enum Rep {
    Exact(Dense<BigRational>),
    Float(Dense<f64>, f64),
}

impl StabilizerGenerators {
    /// Wraps an `n x 2n` matrix. Only the shape is checked here; see
    /// [`StabilizerGenerators::is_valid`].
    pub fn from_matrix(h: Matrix) -> Result<Self> {
        let n = h.rows();
        if h.cols() != 2 * n || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: format!("{n} x {}", 2 * n),
                found: format!("{} x {}", h.rows(), h.cols()),
            });
        }
        Ok(StabilizerGenerators { n, h })
    }

    /// `(A | -I)` for a symmetric adjacency matrix.
    pub fn from_cluster(a: &AdjacencyMatrix) -> Self {
        let n = a.n();
        let mut grid: Vec<Vec<Scalar>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = a.matrix().row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { Scalar::int(-1) } else { Scalar::zero() }));
            grid.push(row);
        }
        let h = Matrix::from_rows(grid).expect("rectangular");
        let h = h.with_backend(a.matrix().backend()).expect("backend of the source matrix");
        StabilizerGenerators { n, h }
    }

    /// `B = (G; 0)`, `A = (0; h)` with `h` a parity check of `G`.
    pub fn from_mds(g: &GeneratorMatrix) -> Self {
        let (k, n) = (g.k(), g.n());
        let parity = g.matrix().nullspace();
        debug_assert_eq!(parity.len(), n - k);
        let mut grid: Vec<Vec<Scalar>> = Vec::with_capacity(n);
        for i in 0..k {
            let mut row = alloc::vec![Scalar::zero(); n];
            row.extend(g.matrix().row(i).iter().cloned().map(|s| -s));
            grid.push(row);
        }
        for check in parity {
            let mut row = check;
            row.extend(alloc::vec![Scalar::zero(); n]);
            grid.push(row);
        }
        let h = Matrix::from_rows(grid).expect("rectangular");
        let h = match g.matrix().backend() {
            Backend::Exact => h,
            b => h.with_backend(b).expect("float backend accepts any entries"),
        };
        StabilizerGenerators { n, h }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.h
    }

    fn rep(&self) -> Rep {
        match self.h.to_rational().filter(|_| self.h.backend().is_exact()) {
            Some(q) => Rep::Exact(q),
            None => {
                let d = self.h.to_dense_f64();
                let tol = match self.h.backend() {
                    Backend::Float { tol: Some(t) } => t,
                    _ => 1e-10 * d.max_magnitude().max(1.0),
                };
                Rep::Float(d, tol)
            }
        }
    }

    fn with_dense<F: Field>(&self, d: Dense<F>, wrap: impl Fn(Dense<F>) -> Matrix) -> Self {
        StabilizerGenerators { n: self.n, h: wrap(d) }
    }

    /// Full rank and `H Ω Hᵀ = 0`, exactly or entrywise within `1e-10`
    /// (scaled by the squared entry magnitude) on the float backend.
    pub fn is_valid(&self) -> bool {
        match self.rep() {
            Rep::Exact(h) => h.rank(0.0) == self.n && symplectic_gram(&h, self.n).data.iter().all(|x| x.negligible(0.0)),
            Rep::Float(h, tol) => {
                let scale = h.max_magnitude().max(1.0);
                h.rank(tol) == self.n && symplectic_gram(&h, self.n).max_magnitude() < 1e-10 * scale * scale
            }
        }
    }

    fn require_valid(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidStabilizer("H must have full rank and satisfy H Ω Hᵀ = 0".into()))
        }
    }

    /// Re-presents the same state by left-multiplying with an invertible `r`.
    pub fn with_row_basis(&self, r: &Matrix) -> Result<Self> {
        if r.rows() != self.n || r.cols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: format!("{0} x {0}", self.n),
                found: format!("{} x {}", r.rows(), r.cols()),
            });
        }
        if r.rank() < self.n {
            return Err(Error::RankDeficient { rank: r.rank(), required: self.n });
        }
        let h = r.mul(&self.h)?;
        Ok(StabilizerGenerators { n: self.n, h })
    }

    /// Applies a Fourier transform to each listed mode.
    pub fn fourier(&self, modes: &[usize]) -> Result<Self> {
        if let Some(&m) = modes.iter().find(|&&m| m >= self.n) {
            return Err(Error::IndexOutOfRange { index: m, bound: self.n });
        }
        Ok(match self.rep() {
            Rep::Exact(h) => self.with_dense(fourier_columns(&h, self.n, modes), Matrix::from_dense_rational),
            Rep::Float(h, _) => {
                let tol = match self.h.backend() {
                    Backend::Float { tol } => tol,
                    Backend::Exact => None,
                };
                self.with_dense(fourier_columns(&h, self.n, modes), |d| Matrix::from_dense_f64(d, tol))
            }
        })
    }

    /// Brings the state to cluster form with single-mode Fourier transforms
    /// and a change of row basis.
    pub fn cluster_form(&self) -> Result<ClusterForm> {
        self.require_valid()?;
        match self.rep() {
            Rep::Exact(h) => {
                let out = reduce_to_cluster(&h, self.n, 0.0)?;
                let adjacency = AdjacencyMatrix::new(Matrix::from_dense_rational(out.adjacency.clone()))?;
                Ok(ClusterForm { adjacency, log: out.log(Matrix::from_dense_rational) })
            }
            Rep::Float(h, tol) => {
                let out = reduce_to_cluster(&h, self.n, tol)?;
                let mut a = out.adjacency.clone();
                for i in 0..self.n {
                    for j in 0..i {
                        let avg = 0.5 * (a.get(i, j) + a.get(j, i));
                        a.set(i, j, avg);
                        a.set(j, i, avg);
                    }
                }
                let tol = float_tol_override(&self.h);
                let adjacency = AdjacencyMatrix::new(Matrix::from_dense_f64(a, tol))?;
                Ok(ClusterForm { adjacency, log: out.log(|d| Matrix::from_dense_f64(d, tol)) })
            }
        }
    }

    /// A nonzero nullifier acting trivially on every mode outside `support`.
    pub fn local_nullifier(&self, support: &[usize]) -> Result<Option<LocalNullifier>> {
        self.require_valid()?;
        if let Some(&m) = support.iter().find(|&&m| m >= self.n) {
            return Err(Error::IndexOutOfRange { index: m, bound: self.n });
        }
        Ok(match self.rep() {
            Rep::Exact(h) => local_nullifier_in(&h, self.n, support, 0.0).map(|(r, v)| LocalNullifier {
                coefficients: r.into_iter().map(Scalar::Rational).collect(),
                nullifier: v.into_iter().map(Scalar::Rational).collect(),
            }),
            Rep::Float(h, tol) => local_nullifier_in(&h, self.n, support, tol).map(|(r, v)| LocalNullifier {
                coefficients: r.into_iter().map(Scalar::Float).collect(),
                nullifier: v.into_iter().map(Scalar::Float).collect(),
            }),
        })
    }

    fn has_local_nullifier(&self, support: &[usize]) -> bool {
        match self.rep() {
            Rep::Exact(h) => outside_columns(&h, self.n, support).rank(0.0) < self.n,
            Rep::Float(h, tol) => outside_columns(&h, self.n, support).rank(tol) < self.n,
        }
    }

    /// Minimum number of modes supporting a nonzero nullifier.
    pub fn pure_distance(&self) -> Result<usize> {
        self.require_valid()?;
        for w in 1..=self.n {
            if Combinations::new(self.n, w).any(|s| self.has_local_nullifier(&s)) {
                return Ok(w);
            }
        }
        Err(Error::PostCondition("full support must carry a nullifier".into()))
    }

    /// Uniformity of the cluster form, which is locally equivalent.
    pub fn uniformity(&self) -> Result<StabilizerReport> {
        let cluster = self.cluster_form()?;
        let report = max_uniformity(&cluster.adjacency);
        Ok(StabilizerReport { report, cluster })
    }
}

/// Absolute rank threshold for matrices derived from a float `H`: the
/// caller's override, or `1e-9` relative to the largest entry.
fn float_tol_override(h: &Matrix) -> Option<f64> {
    match h.backend() {
        Backend::Float { tol: Some(t) } => Some(t),
        Backend::Float { tol: None } => {
            let scale = h.to_dense_f64().max_magnitude().max(1.0);
            Some(1e-9 * scale)
        }
        Backend::Exact => None,
    }
}

/// `H Ω Hᵀ = X Pᵀ - P Xᵀ` for `H = (X | P)`.
fn symplectic_gram<F: Field>(h: &Dense<F>, n: usize) -> Dense<F> {
    let rows: Vec<usize> = (0..h.rows).collect();
    let x = h.select(&rows, &(0..n).collect::<Vec<_>>());
    let p = h.select(&rows, &(n..2 * n).collect::<Vec<_>>());
    let xp = x.mul(&p.transpose());
    let px = p.mul(&x.transpose());
    let data = xp.data.into_iter().zip(px.data).map(|(a, b)| a - b).collect();
    Dense::from_vec(h.rows, h.rows, data)
}

/// `x -> p, p -> -x` on each mode: the new `x` coefficient is minus the old
/// `p` coefficient and the new `p` coefficient is the old `x` coefficient.
fn fourier_columns<F: Field>(h: &Dense<F>, n: usize, modes: &[usize]) -> Dense<F> {
    let mut out = h.clone();
    for i in 0..h.rows {
        for &m in modes {
            let x = h.get(i, m).clone();
            let p = h.get(i, n + m).clone();
            out.set(i, m, -p);
            out.set(i, n + m, x);
        }
    }
    out
}

struct Reduction<F> {
    adjacency: Dense<F>,
    fourier: Vec<usize>,
    row_change: Dense<F>,
}

impl<F: Field> Reduction<F> {
    fn log(self, wrap: impl Fn(Dense<F>) -> Matrix) -> LocalOpLog {
        let mut log = Vec::new();
        if !self.fourier.is_empty() {
            log.push(LocalOp::Fourier(self.fourier));
        }
        let n = self.row_change.rows;
        let is_identity = self
            .row_change
            .data
            .iter()
            .enumerate()
            .all(|(idx, v)| if idx / n == idx % n { (v.clone() - F::one()).negligible(1e-12) } else { v.negligible(1e-12) });
        if !is_identity {
            log.push(LocalOp::RowBasisChange(wrap(self.row_change)));
        }
        log
    }
}

/// Row-reduce the momentum block, Fourier the modes that carry no momentum
/// pivot, then invert the (now invertible) momentum block. The row change
/// recorded is `B'^{-1}`, taking `F(H)` to `(A' | -I)`.
fn reduce_to_cluster<F: Field>(h: &Dense<F>, n: usize, tol: f64) -> Result<Reduction<F>> {
    let rows: Vec<usize> = (0..n).collect();
    let p_block = h.select(&rows, &(n..2 * n).collect::<Vec<_>>());
    // Leftmost momentum pivots pick S with B_S invertible. Row operations
    // commute with the column-wise Fourier step, so the echelon form itself
    // is not needed: the momentum block of F(H) is invertible already.
    let pivots = p_block.rref(tol).pivots;
    let fourier = complement(n, &pivots);

    let transformed = fourier_columns(h, n, &fourier);
    // B' with H' = (A' | -B')
    let b = transformed.select(&rows, &(n..2 * n).collect::<Vec<_>>());
    let b = Dense::from_vec(n, n, b.data.into_iter().map(|v| -v).collect());
    let b_inv = b
        .inverse(tol)
        .ok_or_else(|| Error::PostCondition("momentum block singular after Fourier step".into()))?;
    let x = transformed.select(&rows, &(0..n).collect::<Vec<_>>());
    let adjacency = b_inv.mul(&x);

    let sym_tol = if F::EXACT { 0.0 } else { 1e-8 * adjacency.max_magnitude().max(1.0) };
    for i in 0..n {
        for j in 0..i {
            if !(adjacency.get(i, j).clone() - adjacency.get(j, i).clone()).negligible(sym_tol) {
                return Err(Error::PostCondition("reduced adjacency is not symmetric".into()));
            }
        }
    }

    // The Fourier-transformed H and (A' | -I) must span the same rows.
    let mut cluster = adjacency.hstack(&Dense::identity(n));
    for i in 0..n {
        let v = -cluster.get(i, n + i).clone();
        cluster.set(i, n + i, v);
    }
    let stacked = transformed.vstack(&cluster);
    let span_tol = if F::EXACT { 0.0 } else { 1e-8 * stacked.max_magnitude().max(1.0) };
    if stacked.rank(span_tol) != n {
        return Err(Error::PostCondition("row spaces differ after reduction".into()));
    }

    Ok(Reduction { adjacency, fourier, row_change: b_inv })
}

/// Columns of `H` belonging to modes outside `support`.
fn outside_columns<F: Field>(h: &Dense<F>, n: usize, support: &[usize]) -> Dense<F> {
    let outside = complement(n, support);
    let cols: Vec<usize> = outside.iter().copied().chain(outside.iter().map(|&m| n + m)).collect();
    h.select(&(0..n).collect::<Vec<_>>(), &cols)
}

fn local_nullifier_in<F: Field>(h: &Dense<F>, n: usize, support: &[usize], tol: f64) -> Option<(Vec<F>, Vec<F>)> {
    let restricted = outside_columns(h, n, support);
    let r = restricted.transpose().nullspace(tol).into_iter().next()?;
    let row = Dense::from_vec(1, n, r.clone()).mul(h);
    Some((r, row.data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{ghz_generator, hilbert, pascal};
    use alloc::vec;

    fn ghz() -> StabilizerGenerators {
        StabilizerGenerators::from_mds(&ghz_generator(3).unwrap())
    }

    #[test]
    fn validation() {
        let mut grid = vec![vec![Scalar::zero(); 4]; 2];
        grid[0][2] = Scalar::int(-1);
        grid[1][3] = Scalar::int(-1);
        let momentum = StabilizerGenerators::from_matrix(Matrix::from_rows(grid).unwrap()).unwrap();
        assert!(momentum.is_valid());
        assert!(StabilizerGenerators::from_cluster(&pascal(4).unwrap()).is_valid());
        let asym = Matrix::from_ints(&[[0, 1, -1, 0], [2, 0, 0, -1]]);
        assert!(!StabilizerGenerators::from_matrix(asym).unwrap().is_valid());
        assert!(StabilizerGenerators::from_matrix(Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn mds_stabilizers_are_valid() {
        let g = ghz();
        assert!(g.is_valid());
        let nodes: Vec<BigRational> = (1..=4).map(|x| BigRational::from_integer(x.into())).collect();
        let rs = crate::families::mds_vandermonde_generator(2, 4, &nodes).unwrap();
        assert!(StabilizerGenerators::from_mds(&rs).is_valid());
        let id = GeneratorMatrix::new(Matrix::identity(3)).unwrap();
        let h = StabilizerGenerators::from_mds(&id);
        assert!(h.is_valid());
        assert_eq!(h.cluster_form().unwrap().adjacency.matrix(), &Matrix::zeros(3, 3));
    }

    #[test]
    fn cluster_form_of_cluster_is_identity() {
        let a = pascal(4).unwrap();
        let cf = StabilizerGenerators::from_cluster(&a).cluster_form().unwrap();
        assert_eq!(cf.adjacency, a);
        assert!(cf.log.is_empty());
    }

    #[test]
    fn cluster_form_of_ghz_needs_two_fourier_modes() {
        let cf = ghz().cluster_form().unwrap();
        assert_eq!(cf.fourier_modes().len(), 2);
    }

    #[test]
    fn cluster_form_inverts_momentum_block() {
        // H = diag(2,1,1) (A | -I) is (2A_0 | -B) with B = diag(2,1,1).
        let a = hilbert(3).unwrap();
        let mut r = Matrix::identity(3).entries().to_vec();
        r[0] = Scalar::int(2);
        let r = Matrix::new(3, 3, r).unwrap();
        let h = StabilizerGenerators::from_cluster(&a).with_row_basis(&r).unwrap();
        let cf = h.cluster_form().unwrap();
        assert_eq!(cf.adjacency, a);
        assert!(cf.fourier_modes().is_empty());
    }

    #[test]
    fn ghz_local_nullifiers() {
        let h = ghz();
        let found = h.local_nullifier(&[0, 1]).unwrap().unwrap();
        let x: Vec<f64> = found.nullifier.iter().map(Scalar::to_f64).collect();
        assert!(x[2..].iter().all(|&v| v == 0.0));
        assert_eq!(x[0], -x[1]);
        assert_ne!(x[0], 0.0);
        assert!(h.local_nullifier(&[0]).unwrap().is_none());
        assert!(h.local_nullifier(&[0, 1, 2]).unwrap().is_some());
        assert!(h.local_nullifier(&[3]).is_err());
    }

    #[test]
    fn pure_distances() {
        assert_eq!(ghz().pure_distance().unwrap(), 2);
        assert_eq!(StabilizerGenerators::from_cluster(&pascal(4).unwrap()).pure_distance().unwrap(), 3);
        let zero = AdjacencyMatrix::new(Matrix::zeros(3, 3)).unwrap();
        assert_eq!(StabilizerGenerators::from_cluster(&zero).pure_distance().unwrap(), 1);
    }

    #[test]
    fn stabilizer_uniformity_levels() {
        assert_eq!(ghz().uniformity().unwrap().report.k_max, 1);
        let zero = AdjacencyMatrix::new(Matrix::zeros(4, 4)).unwrap();
        assert_eq!(StabilizerGenerators::from_cluster(&zero).uniformity().unwrap().report.k_max, 0);
        let p = StabilizerGenerators::from_cluster(&pascal(4).unwrap()).uniformity().unwrap();
        assert_eq!(p.report.k_max, 2);
    }

    #[test]
    fn invalid_input_is_rejected() {
        let asym = Matrix::from_ints(&[[0, 1, -1, 0], [2, 0, 0, -1]]);
        let h = StabilizerGenerators::from_matrix(asym).unwrap();
        assert!(matches!(h.cluster_form(), Err(Error::InvalidStabilizer(_))));
        assert!(h.pure_distance().is_err());
    }
}
