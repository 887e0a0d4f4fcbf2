use cvame_core::families::{hilbert, pascal, random_adjacency};
use cvame_core::gaussian::{
    cluster_covariance, epr_extraction, uniformity_oracle, CovarianceMatrix, Pairing, SqueezeParam, TeleportationChannel,
};
use cvame_core::stabilizer::StabilizerGenerators;
use cvame_core::subsets::Combinations;
use cvame_core::uniformity::max_uniformity;
use cvame_core::{AdjacencyMatrix, SymplecticForm};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn db(x: f64) -> SqueezeParam {
    SqueezeParam::from_db(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cluster_covariance_is_pure(n in 1usize..=6, seed in any::<u64>(), r in 0.0f64..3.0) {
        let a = random_adjacency(n, seed).unwrap();
        let cov = cluster_covariance(&a, SqueezeParam::new(r).unwrap()).unwrap();
        for nu in cov.symplectic_eigenvalues().unwrap() {
            prop_assert!((nu - 1.0).abs() < 1e-8, "nu = {}", nu);
        }
        prop_assert!((cov.purity() - 1.0).abs() < 1e-8);
        prop_assert!(CovarianceMatrix::new(cov.matrix().clone()).is_ok());
    }

    #[test]
    fn reduced_purity_lies_in_unit_interval(n in 2usize..=6, seed in any::<u64>(), x in 0.0f64..40.0, mask in 1u32..63) {
        let a = random_adjacency(n, seed).unwrap();
        let modes: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!modes.is_empty());
        let p = uniformity_oracle(&a, &modes, db(x)).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0 + 1e-9);
    }

    #[test]
    fn oracle_matches_assembled_covariance(n in 2usize..=6, seed in any::<u64>(), x in 0.0f64..15.0, mask in 1u32..63) {
        let a = random_adjacency(n, seed).unwrap();
        let modes: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!modes.is_empty());
        let direct = cluster_covariance(&a, db(x)).unwrap().reduced(&modes).unwrap().purity();
        let factored = uniformity_oracle(&a, &modes, db(x)).unwrap();
        prop_assert!((direct - factored).abs() < 1e-8 * direct.max(1e-3));
    }

    #[test]
    fn whole_state_stays_pure_at_high_squeezing(n in 1usize..=6, seed in any::<u64>(), x in 0.0f64..100.0) {
        let a = random_adjacency(n, seed).unwrap();
        let all: Vec<usize> = (0..n).collect();
        prop_assert!((uniformity_oracle(&a, &all, db(x)).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn extraction_is_symplectic_and_local(n in 2usize..=7, seed in any::<u64>()) {
        let a = random_adjacency(n, seed).unwrap();
        let pairing = Pairing::default_for(n).unwrap();
        let s = epr_extraction(&StabilizerGenerators::from_cluster(&a), &pairing).unwrap();
        let omega = SymplecticForm::new(n).to_dmatrix();
        let scale = s.amax().max(1.0);
        prop_assert!((&s * &omega * s.transpose() - &omega).amax() < 1e-10 * scale * scale);
        for &m in pairing.senders() {
            for q in [m, n + m] {
                let mut unit = DMatrix::<f64>::zeros(1, 2 * n);
                unit[(0, q)] = 1.0;
                prop_assert_eq!(s.row(q).into_owned(), unit.clone());
                prop_assert_eq!(s.column(q).transpose(), unit);
            }
        }
    }

    #[test]
    fn fidelity_is_bounded_and_nondecreasing(n in 2usize..=6, seed in any::<u64>()) {
        let a = random_adjacency(n, seed).unwrap();
        let ch = TeleportationChannel::new(&a, &Pairing::default_for(n).unwrap()).unwrap();
        let mut prev = 0.0;
        for x in (0..=60).step_by(5) {
            let f = ch.fidelity(db(x as f64));
            prop_assert!(f > 0.0 && f <= 1.0);
            prop_assert!(f >= prev - 1e-12);
            prev = f;
        }
    }
}

fn assert_monotone_suppression(a: &AdjacencyMatrix) {
    assert!(max_uniformity(a).is_ame);
    let n = a.n();
    for s in Combinations::new(n, n / 2) {
        let mut prev = f64::INFINITY;
        for x in 0..=50 {
            let p = uniformity_oracle(a, &s, db(x as f64)).unwrap();
            assert!(p <= prev * (1.0 + 1e-9), "{s:?} at {x} dB: {p} > {prev}");
            prev = p;
        }
    }
}

#[test]
fn suppression_is_monotone_for_ame_states() {
    for n in 2..=6 {
        assert_monotone_suppression(&pascal(n).unwrap());
        assert_monotone_suppression(&hilbert(n.min(4)).unwrap());
        assert_monotone_suppression(&random_adjacency(n, 11).unwrap());
    }
}

#[test]
fn squeeze_param_round_trips() {
    for x in [0.0, 0.5, 3.0, 33.007, 99.9] {
        assert!((db(x).db() - x).abs() < 1e-12);
    }
}
