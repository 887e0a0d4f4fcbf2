//! Rank criteria for k-uniformity of cluster, rotor and Zak states, MDS
//! generators, total positivity, and multi-unitary directions.
//!
//! Mode indices are 0-based throughout. A cluster state with adjacency `A`
//! is k-uniform iff for every size-`k` mode set `S` the block of `A` with
//! rows outside `S` and columns in `S` has rank `k`.

use alloc::format;
use alloc::vec::Vec;
use core::time::Duration;

use crate::error::{Error, Result};
use crate::families::{AdjacencyMatrix, GeneratorMatrix};
use crate::matrix::{is_positive, Backend, Matrix};
use crate::subsets::{complement, Combinations};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// Lexicographically first failing subset, when `holds` is false.
    pub witness: Option<Vec<usize>>,
}

impl Verdict {
    fn from_witness(witness: Option<Vec<usize>>) -> Self {
        Verdict { holds: witness.is_none(), witness }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub k: usize,
    pub subset: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub n: usize,
    pub k_max: usize,
    pub is_ame: bool,
    pub witnesses: Vec<Witness>,
    pub backend: Backend,
    pub elapsed: Option<Duration>,
}

struct Stopwatch {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Stopwatch {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Option<Duration> {
        #[cfg(feature = "std")]
        {
            Some(self.start.elapsed())
        }
        #[cfg(not(feature = "std"))]
        {
            None
        }
    }
}

/// First size-`k` subset `S` whose off-diagonal block `m[S^c, S]` is rank deficient.
fn first_deficient_cut(m: &Matrix, k: usize) -> Result<Option<Vec<usize>>> {
    let n = m.rows();
    for s in Combinations::new(n, k) {
        let rest = complement(n, &s);
        if m.submatrix(&rest, &s)?.rank() < k {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

fn check_level(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n / 2 {
        return Err(Error::UniformityOutOfRange { k, max: n / 2 });
    }
    Ok(())
}

pub fn is_k_uniform_cluster(a: &AdjacencyMatrix, k: usize) -> Result<Verdict> {
    check_level(a.n(), k)?;
    first_deficient_cut(a.matrix(), k).map(Verdict::from_witness)
}

/// Largest `k` such that the state is k'-uniform for every `k' <= k`.
pub fn max_uniformity(a: &AdjacencyMatrix) -> UniformityReport {
    uniformity_of_matrix(a.matrix())
}

fn uniformity_of_matrix(m: &Matrix) -> UniformityReport {
    let clock = Stopwatch::start();
    let n = m.rows();
    let mut k_max = 0;
    let mut witnesses = Vec::new();
    for k in 1..=n / 2 {
        match first_deficient_cut(m, k).expect("subsets lie within bounds") {
            None => k_max = k,
            Some(subset) => {
                witnesses.push(Witness { k, subset });
                break;
            }
        }
    }
    UniformityReport {
        n,
        k_max,
        is_ame: k_max == n / 2,
        witnesses,
        backend: m.backend(),
        elapsed: clock.elapsed(),
    }
}

/// Every choice of `k` columns of `G` is invertible. The witness is the
/// first singular column set.
pub fn is_mds_generator(g: &GeneratorMatrix) -> Verdict {
    let m = g.matrix();
    let rows: Vec<usize> = (0..g.k()).collect();
    let witness = Combinations::new(g.n(), g.k())
        .find(|cols| m.submatrix(&rows, cols).expect("in range").rank() < g.k());
    Verdict::from_witness(witness)
}

/// Total positivity by Fekete's criterion: all minors on contiguous rows
/// and contiguous columns are positive.
pub fn is_totally_positive(m: &Matrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    for size in 1..=n {
        for i in 0..=(n - size) {
            let rows: Vec<usize> = (i..i + size).collect();
            for j in 0..=(n - size) {
                let cols: Vec<usize> = (j..j + size).collect();
                if !is_positive(&m.submatrix(&rows, &cols)?.determinant()?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Total positivity by enumerating every square minor. Exponential; meant
/// as a cross-check for small matrices.
pub fn is_totally_positive_exhaustive(m: &Matrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    for size in 1..=n {
        for rows in Combinations::new(n, size) {
            for cols in Combinations::new(n, size) {
                if !is_positive(&m.submatrix(&rows, &cols)?.determinant()?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Symmetric integer matrix defining a rotor cluster state.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorMatrix(Matrix);

impl RotorMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if !m.get(i, j).is_integer() || !m.get(i, j).is_exact() {
                    return Err(Error::NonInteger { row: i, col: j });
                }
            }
        }
        if !m.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(RotorMatrix(m))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

/// For integer `C`, the restricted phase homomorphism is injective iff the
/// off-diagonal block has full column rank over the rationals.
pub fn rotor_k_uniform(c: &RotorMatrix, k: usize) -> Result<Verdict> {
    check_level(c.n(), k)?;
    first_deficient_cut(c.matrix(), k).map(Verdict::from_witness)
}

pub fn rotor_max_uniformity(c: &RotorMatrix) -> UniformityReport {
    uniformity_of_matrix(c.matrix())
}

/// Position-side and momentum-side phase matrices of a Zak cluster state.
#[derive(Debug, Clone, PartialEq)]
pub struct ZakPair {
    a: RotorMatrix,
    p: RotorMatrix,
}

impl ZakPair {
    pub fn new(a: RotorMatrix, p: RotorMatrix) -> Result<Self> {
        if a.n() != p.n() {
            return Err(Error::DimensionMismatch { expected: format!("{} modes", a.n()), found: format!("{}", p.n()) });
        }
        Ok(ZakPair { a, p })
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &RotorMatrix {
        &self.a
    }

    pub fn p(&self) -> &RotorMatrix {
        &self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZakSide {
    A,
    P,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZakVerdict {
    pub holds: bool,
    pub witness: Option<(ZakSide, Vec<usize>)>,
}

pub fn zak_k_uniform(z: &ZakPair, k: usize) -> Result<ZakVerdict> {
    let a = rotor_k_uniform(&z.a, k)?;
    if let Some(s) = a.witness {
        return Ok(ZakVerdict { holds: false, witness: Some((ZakSide::A, s)) });
    }
    let p = rotor_k_uniform(&z.p, k)?;
    Ok(ZakVerdict { holds: p.holds, witness: p.witness.map(|s| (ZakSide::P, s)) })
}

/// Largest uniformity shared by both sides.
pub fn zak_max_uniformity(z: &ZakPair) -> Result<(usize, Option<(ZakSide, Witness)>)> {
    let n = z.n();
    let mut k_max = 0;
    for k in 1..=n / 2 {
        let v = zak_k_uniform(z, k)?;
        match v.witness {
            None => k_max = k,
            Some((side, subset)) => return Ok((k_max, Some((side, Witness { k, subset })))),
        }
    }
    Ok((k_max, None))
}

/// A balanced bipartition and whether the Gaussian operator mapping the
/// sender modes to the receiver modes is unitary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Direction {
    pub senders: Vec<usize>,
    pub receivers: Vec<usize>,
    pub unitary: bool,
}

/// Each unordered balanced bipartition once, sender set containing mode 0.
/// Unitary iff the block `A[receivers, senders]` is invertible.
pub fn multiunitary_directions(a: &AdjacencyMatrix) -> Result<Vec<Direction>> {
    let n = a.n();
    if n % 2 == 1 {
        return Err(Error::OddModeCount(n));
    }
    let half = n / 2;
    let mut out = Vec::new();
    for senders in Combinations::new(n, half).filter(|s| s.first() == Some(&0)) {
        let receivers = complement(n, &senders);
        let unitary = a.matrix().submatrix(&receivers, &senders)?.rank() == half;
        out.push(Direction { senders, receivers, unitary });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{hilbert, pascal};
    use alloc::vec;

    fn two_pairs() -> AdjacencyMatrix {
        AdjacencyMatrix::new(Matrix::from_ints(&[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])).unwrap()
    }

    fn integer_d() -> AdjacencyMatrix {
        AdjacencyMatrix::new(Matrix::from_ints(&[[0, 1, 1, 2], [1, 0, 1, 3], [1, 1, 0, 3], [2, 3, 3, 0]])).unwrap()
    }

    #[test]
    fn pascal_is_ame() {
        assert!(is_k_uniform_cluster(&pascal(4).unwrap(), 2).unwrap().holds);
        let r = max_uniformity(&pascal(4).unwrap());
        assert_eq!((r.k_max, r.is_ame), (2, true));
        assert!(r.witnesses.is_empty());
        assert_eq!(r.backend, Backend::Exact);
    }

    #[test]
    fn negative_witnesses() {
        let zero = AdjacencyMatrix::new(Matrix::zeros(4, 4)).unwrap();
        assert_eq!(is_k_uniform_cluster(&zero, 1).unwrap().witness, Some(vec![0]));
        assert_eq!(is_k_uniform_cluster(&two_pairs(), 2).unwrap().witness, Some(vec![0, 2]));
        assert_eq!(is_k_uniform_cluster(&integer_d(), 2).unwrap().witness, Some(vec![0, 3]));
        let r = max_uniformity(&two_pairs());
        assert_eq!((r.k_max, r.is_ame), (1, false));
        assert_eq!(r.witnesses, vec![Witness { k: 2, subset: vec![0, 2] }]);
    }

    #[test]
    fn level_out_of_range() {
        let a = pascal(4).unwrap();
        assert_eq!(is_k_uniform_cluster(&a, 3), Err(Error::UniformityOutOfRange { k: 3, max: 2 }));
        assert!(is_k_uniform_cluster(&a, 0).is_err());
    }

    #[test]
    fn odd_n_ame_at_floor_half() {
        let r = max_uniformity(&hilbert(3).unwrap());
        assert_eq!((r.k_max, r.is_ame), (1, true));
    }

    #[test]
    fn mds_generators() {
        let rep = GeneratorMatrix::new(Matrix::from_ints(&[[1, 1, 1]])).unwrap();
        assert!(is_mds_generator(&rep).holds);
        let bad = GeneratorMatrix::new(Matrix::from_ints(&[[1, 0, 1], [0, 1, 0]])).unwrap();
        assert_eq!(is_mds_generator(&bad).witness, Some(vec![0, 2]));
    }

    #[test]
    fn total_positivity() {
        assert!(is_totally_positive(pascal(4).unwrap().matrix()).unwrap());
        assert!(is_totally_positive(hilbert(3).unwrap().matrix()).unwrap());
        assert!(!is_totally_positive(&Matrix::from_ints(&[[1, 2], [3, 1]])).unwrap());
        assert!(is_totally_positive(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rotor_and_zak() {
        let vdm = RotorMatrix::new(Matrix::from_ints(&[[1, 1, 1], [1, 2, 4], [1, 4, 16]])).unwrap();
        assert!(rotor_k_uniform(&vdm, 1).unwrap().holds);
        let zero = RotorMatrix::new(Matrix::zeros(4, 4)).unwrap();
        assert!(!rotor_k_uniform(&zero, 1).unwrap().holds);
        let p4 = RotorMatrix::new(pascal(4).unwrap().into_matrix()).unwrap();
        assert!(rotor_k_uniform(&p4, 2).unwrap().holds);
        assert!(matches!(RotorMatrix::new(hilbert(2).unwrap().into_matrix()), Err(Error::NonInteger { row: 0, col: 1 })));

        let z = ZakPair::new(p4.clone(), p4.clone()).unwrap();
        assert!(zak_k_uniform(&z, 2).unwrap().holds);
        let z = ZakPair::new(p4.clone(), zero.clone()).unwrap();
        assert_eq!(zak_k_uniform(&z, 1).unwrap().witness, Some((ZakSide::P, vec![0])));
        let z = ZakPair::new(zero.clone(), zero).unwrap();
        assert!(!zak_k_uniform(&z, 1).unwrap().holds);
        let small = RotorMatrix::new(Matrix::zeros(2, 2)).unwrap();
        assert!(ZakPair::new(p4, small).is_err());
    }

    #[test]
    fn multiunitary() {
        let dirs = multiunitary_directions(&pascal(4).unwrap()).unwrap();
        assert_eq!(dirs.len(), 3);
        assert!(dirs.iter().all(|d| d.unitary));
        let dirs = multiunitary_directions(&two_pairs()).unwrap();
        let verdicts: Vec<(Vec<usize>, bool)> = dirs.into_iter().map(|d| (d.senders, d.unitary)).collect();
        assert_eq!(verdicts, vec![(vec![0, 1], true), (vec![0, 2], false), (vec![0, 3], true)]);
        let zero = AdjacencyMatrix::new(Matrix::zeros(4, 4)).unwrap();
        assert!(multiunitary_directions(&zero).unwrap().iter().all(|d| !d.unitary));
        assert_eq!(multiunitary_directions(&hilbert(3).unwrap()), Err(Error::OddModeCount(3)));
    }
}
