//! Explicit adjacency and generator matrix families.
//!
//! Documentation uses 1-based `(j, l)` indices; Pascal is the one family
//! whose closed form is written with 0-based indices.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Symmetric `n x n` weighted adjacency matrix of a CV cluster state.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix(Matrix);

impl AdjacencyMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if !m.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(AdjacencyMatrix(m))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Conjugation by a mode relabeling: entry `(i, j)` moves to `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut inverse = alloc::vec![usize::MAX; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || inverse[p] != usize::MAX {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{n}")));
            }
            inverse[p] = i;
        }
        if perm.len() != n {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let m = self.0.submatrix(&inverse, &inverse)?;
        Ok(AdjacencyMatrix(m))
    }
}

/// `k x n` generator matrix of a real linear code, full row rank.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix(Matrix);

impl GeneratorMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() > m.cols() {
            return Err(Error::DimensionMismatch {
                expected: format!("k <= n = {}", m.cols()),
                found: format!("k = {}", m.rows()),
            });
        }
        let rank = m.rank();
        if rank < m.rows() {
            return Err(Error::RankDeficient { rank, required: m.rows() });
        }
        Ok(GeneratorMatrix(m))
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }

    pub fn n(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("matrix order must be at least 1".into()));
    }
    Ok(())
}

fn symmetric_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Result<AdjacencyMatrix> {
    check_order(n)?;
    let mut grid: Vec<Vec<Scalar>> = (0..n).map(|_| Vec::with_capacity(n)).collect();
    for j in 0..n {
        for l in 0..n {
            let v = if l < j { grid[l][j].clone() } else { f(j, l) };
            grid[j].push(v);
        }
    }
    AdjacencyMatrix::new(Matrix::from_rows(grid)?)
}

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Symmetric Pascal matrix, entry `binomial(j + l, j)` for 0-based `j, l`.
pub fn pascal(n: usize) -> Result<AdjacencyMatrix> {
    symmetric_from_fn(n, |j, l| Scalar::Rational(BigRational::from_integer(binomial((j + l) as u64, j as u64))))
}

/// Hilbert matrix, entry `1 / (j + l - 1)`.
pub fn hilbert(n: usize) -> Result<AdjacencyMatrix> {
    symmetric_from_fn(n, |j, l| Scalar::Rational(BigRational::new(BigInt::one(), BigInt::from(j + l + 1))))
}

/// Cauchy matrix with entries `1 / (v_j + w_l)`.
pub fn cauchy(v: &[Scalar], w: &[Scalar]) -> Result<Matrix> {
    let mut entries = Vec::with_capacity(v.len() * w.len());
    for (j, vj) in v.iter().enumerate() {
        for (l, wl) in w.iter().enumerate() {
            let entry = match (vj.as_rational(), wl.as_rational()) {
                (Some(a), Some(b)) => {
                    let s = a + b;
                    if s.is_zero() {
                        return Err(Error::ZeroDenominator { row: j, col: l });
                    }
                    Scalar::Rational(s.recip())
                }
                _ => {
                    let s = vj.to_f64() + wl.to_f64();
                    if s == 0.0 {
                        return Err(Error::ZeroDenominator { row: j, col: l });
                    }
                    Scalar::Float(1.0 / s)
                }
            };
            entries.push(entry);
        }
    }
    Matrix::new(v.len(), w.len(), entries)
}

/// Hankel matrix, entry `seq[j + l - 2]`; needs `2n - 1` terms.
pub fn hankel(seq: &[Scalar], n: usize) -> Result<AdjacencyMatrix> {
    check_order(n)?;
    if seq.len() < 2 * n - 1 {
        return Err(Error::InvalidParameter(format!(
            "hankel of order {n} needs {} terms, got {}",
            2 * n - 1,
            seq.len()
        )));
    }
    symmetric_from_fn(n, |j, l| seq[j + l].clone())
}

/// Symmetric Vandermonde matrix on geometric nodes, entry `u^((j-1)(l-1))`.
pub fn vandermonde_sym(u: &Scalar, n: usize) -> Result<AdjacencyMatrix> {
    if u.is_zero() {
        return Err(Error::InvalidParameter("vandermonde ratio must be nonzero".into()));
    }
    match u.as_rational() {
        Some(q) => symmetric_from_fn(n, |j, l| Scalar::Rational(num_traits::Pow::pow(q, (j * l) as u32))),
        None => {
            let x = u.to_f64();
            symmetric_from_fn(n, |j, l| Scalar::Float(libm::pow(x, (j * l) as f64)))
        }
    }
}

/// Vandermonde matrix on an arbitrary node list, entry `v_j^(l-1)`.
/// Only symmetric outcomes are adjacency matrices; others are rejected.
pub fn vandermonde_nodes(nodes: &[BigRational]) -> Result<AdjacencyMatrix> {
    let n = nodes.len();
    check_order(n)?;
    let grid = nodes
        .iter()
        .map(|v| (0..n).map(|l| Scalar::Rational(num_traits::Pow::pow(v, l as u32))).collect())
        .collect();
    AdjacencyMatrix::new(Matrix::from_rows(grid)?)
}

/// Exponential kernel `exp(v_j w_l)` on the float backend.
pub fn exp_kernel(v: &[f64], w: &[f64]) -> Matrix {
    let data = v.iter().flat_map(|&a| w.iter().map(move |&b| libm::exp(a * b))).collect();
    Matrix::from_f64(v.len(), w.len(), data)
}

/// Gaussian kernel `u^((j-l)^2)` for `0 < u < 1`, float backend.
pub fn gauss_kernel(u: f64, n: usize) -> Result<AdjacencyMatrix> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter(format!("gauss kernel needs 0 < u < 1, got {u}")));
    }
    symmetric_from_fn(n, |j, l| {
        let d = j as f64 - l as f64;
        Scalar::Float(libm::pow(u, d * d))
    })
    .map(|a| AdjacencyMatrix(a.0.into_float()))
}

/// First `count` primes.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Symmetric matrix of square roots of distinct primes. The upper triangle
/// (diagonal included) is filled row-major with 2, 3, 5, 7, ... and mirrored.
pub fn sqrt_primes(n: usize) -> Result<AdjacencyMatrix> {
    check_order(n)?;
    let ps = primes(n * (n + 1) / 2);
    let mut next = ps.into_iter();
    symmetric_from_fn(n, |_, _| Scalar::sqrt(next.next().expect("enough primes")))
}

/// Version tag of the generator behind [`random_adjacency`].
pub const RANDOM_ADJACENCY_GENERATOR: &str = "chacha20-uniform(-1,1)-v1";

/// Symmetric matrix with i.i.d. uniform(-1, 1) entries on and above the
/// diagonal, reproducible per seed.
pub fn random_adjacency(n: usize, seed: u64) -> Result<AdjacencyMatrix> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    symmetric_from_fn(n, |_, _| Scalar::Float(rng.random_range(-1.0..1.0))).map(|a| AdjacencyMatrix(a.0.into_float()))
}

/// Repetition-code generator `(1, 1, ..., 1)`.
pub fn ghz_generator(n: usize) -> Result<GeneratorMatrix> {
    check_order(n)?;
    GeneratorMatrix::new(Matrix::from_rows(alloc::vec![alloc::vec![Scalar::one(); n]])?)
}

/// `k x n` Vandermonde generator, entry `(i, l) = nodes_l^(i-1)`.
pub fn mds_vandermonde_generator(k: usize, n: usize, nodes: &[BigRational]) -> Result<GeneratorMatrix> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if nodes.len() != n {
        return Err(Error::DimensionMismatch { expected: format!("{n} nodes"), found: format!("{}", nodes.len()) });
    }
    for (a, x) in nodes.iter().enumerate() {
        if x.is_zero() {
            return Err(Error::InvalidParameter("generator nodes must be nonzero".into()));
        }
        if nodes[..a].contains(x) {
            return Err(Error::InvalidParameter(format!("repeated node {x}")));
        }
    }
    let grid = (0..k)
        .map(|i| nodes.iter().map(|x| Scalar::Rational(num_traits::Pow::pow(x, i as u32))).collect())
        .collect();
    GeneratorMatrix::new(Matrix::from_rows(grid)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d).unwrap()
    }

    #[test]
    fn pascal_matches_published_matrix() {
        let a = pascal(4).unwrap();
        assert_eq!(a.matrix(), &Matrix::from_ints(&[[1, 1, 1, 1], [1, 2, 3, 4], [1, 3, 6, 10], [1, 4, 10, 20]]));
        assert_eq!(pascal(1).unwrap().matrix(), &Matrix::from_ints(&[[1]]));
        // binomial(8, 4) oracle
        let b84 = (5..=8).product::<i64>() / (1..=4).product::<i64>();
        assert_eq!(pascal(5).unwrap().matrix().get(4, 4), &Scalar::int(b84));
    }

    #[test]
    fn hilbert_is_a_cauchy_and_a_hankel_matrix() {
        let h = hilbert(3).unwrap();
        let expected = Matrix::from_rows(alloc::vec![
            alloc::vec![q(1, 1), q(1, 2), q(1, 3)],
            alloc::vec![q(1, 2), q(1, 3), q(1, 4)],
            alloc::vec![q(1, 3), q(1, 4), q(1, 5)],
        ])
        .unwrap();
        assert_eq!(h.matrix(), &expected);
        let v: Vec<Scalar> = (1..=3).map(Scalar::int).collect();
        let w: Vec<Scalar> = (0..3).map(Scalar::int).collect();
        assert_eq!(&cauchy(&v, &w).unwrap(), h.matrix());
        let harmonic: Vec<Scalar> = (1..=5).map(|d| q(1, d)).collect();
        assert_eq!(hankel(&harmonic, 3).unwrap(), h);
    }

    #[test]
    fn cauchy_rejects_zero_denominator() {
        let err = cauchy(&[Scalar::int(1)], &[Scalar::int(-1)]).unwrap_err();
        assert_eq!(err, Error::ZeroDenominator { row: 0, col: 0 });
        assert_eq!(cauchy(&[Scalar::int(1)], &[Scalar::int(0)]).unwrap(), Matrix::from_ints(&[[1]]));
    }

    #[test]
    fn hankel_needs_enough_terms() {
        assert!(hankel(&alloc::vec![Scalar::int(1); 4], 3).is_err());
    }

    #[test]
    fn vandermonde_geometric() {
        let half = q(1, 2);
        let a = vandermonde_sym(&half, 3).unwrap();
        let expected = Matrix::from_rows(alloc::vec![
            alloc::vec![q(1, 1), q(1, 1), q(1, 1)],
            alloc::vec![q(1, 1), q(1, 2), q(1, 4)],
            alloc::vec![q(1, 1), q(1, 4), q(1, 16)],
        ])
        .unwrap();
        assert_eq!(a.matrix(), &expected);
        assert_eq!(vandermonde_sym(&half, 4).unwrap().matrix().get(3, 3), &q(1, 512));
        let ones = vandermonde_sym(&Scalar::int(1), 3).unwrap();
        assert!(ones.matrix().entries().iter().all(|e| *e == Scalar::one()));
        assert!(vandermonde_sym(&Scalar::zero(), 3).is_err());
    }

    #[test]
    fn vandermonde_nodes_requires_symmetry() {
        let geometric: Vec<BigRational> = [1, 2, 4].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let a = vandermonde_nodes(&geometric).unwrap();
        assert_eq!(a.matrix(), &Matrix::from_ints(&[[1, 1, 1], [1, 2, 4], [1, 4, 16]]));
        let other: Vec<BigRational> = [1, 2, 3].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        assert_eq!(vandermonde_nodes(&other), Err(Error::NotSymmetric));
    }

    #[test]
    fn kernels() {
        let ones = exp_kernel(&[0.0; 3], &[0.0; 3]);
        assert!(ones.entries().iter().all(|e| e.to_f64() == 1.0));
        assert!(!ones.backend().is_exact());
        let g = gauss_kernel(0.5, 2).unwrap();
        assert_eq!(g.matrix().to_dmatrix(), nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));
        assert_eq!(gauss_kernel(0.5, 3).unwrap().matrix().get(0, 2).to_f64(), 1.0 / 16.0);
        assert!(gauss_kernel(1.0, 3).is_err());
        assert!(gauss_kernel(0.0, 3).is_err());
    }

    #[test]
    fn sqrt_primes_enumeration() {
        let a = sqrt_primes(3).unwrap();
        let expect = [[2, 3, 5], [3, 7, 11], [5, 11, 13]];
        for j in 0..3 {
            for l in 0..3 {
                assert_eq!(a.matrix().get(j, l), &Scalar::sqrt(expect[j][l]));
            }
        }
        assert!(!a.matrix().backend().is_exact());
        assert_eq!(sqrt_primes(1).unwrap().matrix().get(0, 0), &Scalar::sqrt(2));
        assert_eq!(sqrt_primes(4).unwrap().matrix().get(0, 3), &Scalar::sqrt(7));
    }

    #[test]
    fn random_adjacency_is_deterministic_and_symmetric() {
        let a = random_adjacency(6, 7).unwrap();
        assert_eq!(a, random_adjacency(6, 7).unwrap());
        assert_ne!(a, random_adjacency(6, 8).unwrap());
        assert!(a.matrix().is_symmetric());
        assert!(a.matrix().entries().iter().all(|e| e.to_f64().abs() < 1.0));
    }

    #[test]
    fn generators() {
        assert_eq!(ghz_generator(3).unwrap().matrix(), &Matrix::from_ints(&[[1, 1, 1]]));
        let nodes: Vec<BigRational> = (1..=4).map(|x| BigRational::from_integer(x.into())).collect();
        let g = mds_vandermonde_generator(2, 4, &nodes).unwrap();
        assert_eq!(g.matrix(), &Matrix::from_ints(&[[1, 1, 1, 1], [1, 2, 3, 4]]));
        let g1 = mds_vandermonde_generator(1, 4, &nodes).unwrap();
        assert_eq!(g1.matrix(), &Matrix::from_ints(&[[1, 1, 1, 1]]));
        let repeated: Vec<BigRational> = [1, 2, 2].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        assert!(mds_vandermonde_generator(2, 3, &repeated).is_err());
    }

    #[test]
    fn permutation_relabels_modes() {
        let a = pascal(3).unwrap();
        let p = a.permuted(&[2, 0, 1]).unwrap();
        // mode 0 is now mode 2
        assert_eq!(p.matrix().get(2, 2), a.matrix().get(0, 0));
        assert_eq!(p.matrix().get(0, 1), a.matrix().get(1, 2));
        assert!(a.permuted(&[0, 0, 1]).is_err());
    }
}
