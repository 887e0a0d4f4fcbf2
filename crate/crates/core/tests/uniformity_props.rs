use cvame_core::families::{gauss_kernel, hilbert, pascal, random_adjacency, vandermonde_sym};
use cvame_core::uniformity::{is_k_uniform_cluster, is_mds_generator, is_totally_positive, max_uniformity};
use cvame_core::{AdjacencyMatrix, GeneratorMatrix, Matrix, Scalar};
use proptest::prelude::*;

/// Small-integer symmetric matrices, where rank-deficient cuts are common.
fn small_symmetric() -> impl Strategy<Value = AdjacencyMatrix> {
    (2usize..=6).prop_flat_map(|n| {
        prop::collection::vec(-2i64..=2, n * (n + 1) / 2).prop_map(move |upper| {
            let mut grid = vec![vec![0i64; n]; n];
            let mut it = upper.into_iter();
            for i in 0..n {
                for j in i..n {
                    let v = it.next().unwrap();
                    grid[i][j] = v;
                    grid[j][i] = v;
                }
            }
            AdjacencyMatrix::new(Matrix::from_ints(&grid)).unwrap()
        })
    })
}

fn tp_family() -> impl Strategy<Value = AdjacencyMatrix> {
    // Small u drives minors of the float Gaussian kernel below rank tolerance.
    (2usize..=6, 0usize..4, 1i64..=7, 1i64..=7, 0.4f64..0.95).prop_filter_map("nodes u^i must increase", |(n, fam, p, q, u)| {
        match fam {
            0 => Some(pascal(n).unwrap()),
            1 => Some(hilbert(n).unwrap()),
            2 if p > q => Some(vandermonde_sym(&Scalar::ratio(p, q).unwrap(), n).unwrap()),
            3 => Some(gauss_kernel(u, n).unwrap()),
            _ => None,
        }
    })
}

fn stacked_identity(a: &Matrix) -> GeneratorMatrix {
    let k = a.rows();
    let mut entries = Vec::with_capacity(2 * k * k);
    for i in 0..k {
        entries.extend((0..k).map(|j| Scalar::int((i == j) as i64)));
        entries.extend(a.row(i).iter().cloned());
    }
    GeneratorMatrix::new(Matrix::new(k, 2 * k, entries).unwrap().with_backend(a.backend()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn uniformity_is_monotone_in_k(a in small_symmetric()) {
        let report = max_uniformity(&a);
        let mut seen_fail = false;
        for k in 1..=a.n() / 2 {
            let v = is_k_uniform_cluster(&a, k).unwrap();
            if v.holds {
                prop_assert!(!seen_fail, "k = {} holds after a smaller k failed", k);
                prop_assert!(report.k_max >= k);
            } else {
                prop_assert!(report.k_max < k);
                prop_assert!(v.witness.is_some());
                seen_fail = true;
            }
        }
        prop_assert_eq!(report.is_ame, report.k_max == a.n() / 2);
    }

    #[test]
    fn k_max_is_permutation_invariant(
        (a, perm) in small_symmetric().prop_flat_map(|a| {
            let n = a.n();
            (Just(a), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let relabeled = a.permuted(&perm).unwrap();
        prop_assert_eq!(max_uniformity(&a).k_max, max_uniformity(&relabeled).k_max);
    }

    #[test]
    fn float_k_max_is_permutation_invariant(
        (n, seed, perm) in (2usize..=6, any::<u64>()).prop_flat_map(|(n, seed)| {
            (Just(n), Just(seed), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let a = random_adjacency(n, seed).unwrap();
        prop_assert_eq!(max_uniformity(&a).k_max, max_uniformity(&a.permuted(&perm).unwrap()).k_max);
    }

    #[test]
    fn totally_positive_implies_ame(a in tp_family()) {
        prop_assert!(is_totally_positive(a.matrix()).unwrap());
        prop_assert!(max_uniformity(&a).is_ame);
        prop_assert!(is_mds_generator(&stacked_identity(a.matrix())).holds);
    }

    #[test]
    fn totally_positive_random_matrices_are_ame(a in small_symmetric()) {
        if is_totally_positive(a.matrix()).unwrap() {
            prop_assert!(max_uniformity(&a).is_ame);
        }
    }
}

#[test]
fn fekete_shortcut_matches_exhaustive_check() {
    use cvame_core::uniformity::is_totally_positive_exhaustive;
    for n in 1..=5 {
        for a in [pascal(n).unwrap(), hilbert(n).unwrap()] {
            assert!(is_totally_positive_exhaustive(a.matrix()).unwrap());
        }
    }
    let not_tp = Matrix::from_ints(&[[1, 2], [2, 1]]);
    assert!(!is_totally_positive(&not_tp).unwrap());
    assert!(!is_totally_positive_exhaustive(&not_tp).unwrap());
}
