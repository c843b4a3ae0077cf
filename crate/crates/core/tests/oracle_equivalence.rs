mod common;

use common::{labels, max_amplitude_gap, random_ket, random_ket_on, random_pattern, random_unitary};
use fockswap::detection::measure_pattern;
use fockswap::fock::fidelity;
use fockswap::optics::apply_mode_unitary;
use fockswap::oracle::{dense_apply, dense_fidelity, dense_measure, DenseEngine, DenseState};
use fockswap::protocols::{
    Herald, PhaseParams, PolParams, Scheme, SchemeAParams, SchemeBParams, SparseEngine, VacParams, Variant,
};
use fockswap::sources::PolarizationWeights;
use fockswap::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sparse_and_dense_agree(
        m in 2usize..=4,
        cutoff in 1usize..=3,
        arity in 2usize..=4,
        watched in 1usize..=3,
        eta in 0.05f64..=1.0,
        seed in any::<u64>(),
    ) {
        let arity = arity.min(m);
        let watched = watched.min(m - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ket = random_ket(&mut rng, m, cutoff, 3);
        let u = random_unitary(&mut rng, arity);
        let names = labels(m);
        let modes: Vec<&str> = names.iter().rev().take(arity).map(String::as_str).collect();

        let sparse = apply_mode_unitary(&ket, &u, &modes).unwrap();
        let dense = dense_apply(&DenseState::from_ket(&ket).unwrap(), &u, &modes).unwrap();
        prop_assert!(max_amplitude_gap(&sparse, &dense.to_ket().unwrap()) <= TOL);

        let pattern = random_pattern(&mut rng, m, watched, eta);
        let s = measure_pattern(&sparse, &pattern).unwrap();
        let d = dense_measure(&dense, &pattern).unwrap();
        prop_assert!((s.probability - d.probability).abs() <= TOL);
        prop_assert_eq!(s.is_impossible(), d.is_impossible());

        if let (Some(se), Some(de)) = (&s.ensemble, &d.ensemble) {
            let target = random_ket_on(&mut rng, se.register().labels(), 3, 3);
            let fs = fidelity(se, &target).unwrap();
            let fd = dense_fidelity(de, &target).unwrap();
            prop_assert!((fs - fd).abs() <= TOL, "{} vs {}", fs, fd);
        }
    }

    #[test]
    fn pipelines_agree_with_oracle(
        tau2 in 0.0f64..0.2,
        eta in 0.0f64..=1.0,
        epsilon in 0.01f64..0.99,
        order in 1usize..=2,
        pbs in any::<bool>(),
    ) {
        let tau = C64::new(tau2.sqrt(), 0.0);
        let schemes = [
            Scheme::A(SchemeAParams { tau, eta, order }),
            Scheme::B(SchemeBParams {
                epsilon,
                eta,
                order,
                tau,
                variant: if pbs { Variant::Pbs } else { Variant::Ubs },
            }),
            Scheme::VerifyPhase(PhaseParams { tau, eta, order, herald: Herald::SchemeA }),
            Scheme::PostselectVac(VacParams { eta }),
        ];
        for scheme in schemes {
            let sparse = scheme.run_with(&SparseEngine::default()).unwrap();
            let dense = scheme.run_with(&DenseEngine).unwrap();
            let dev = sparse.max_deviation(&dense);
            prop_assert!(dev <= TOL, "{:?}: deviation {}", scheme, dev);
        }
    }
}

#[test]
fn polarization_pipeline_agrees_with_oracle() {
    for weights in [
        PolarizationWeights::AS_PRINTED,
        PolarizationWeights::X_ONLY,
        PolarizationWeights::second_order(0.1),
    ] {
        for eta in [1.0, 0.6, 0.0] {
            let scheme = Scheme::PostselectPol(PolParams { eta, weights });
            let dev = scheme
                .run_with(&SparseEngine::default())
                .unwrap()
                .max_deviation(&scheme.run_with(&DenseEngine).unwrap());
            assert!(dev <= TOL, "{weights:?} eta={eta}: {dev}");
        }
    }
}

#[test]
fn swapping_pipelines_agree_with_oracle() {
    for scheme in [
        Scheme::BellCheck,
        Scheme::Theta(0.1),
        Scheme::Theta(0.3),
        Scheme::Theta(1.2),
    ] {
        let dev = scheme
            .run_with(&SparseEngine::default())
            .unwrap()
            .max_deviation(&scheme.run_with(&DenseEngine).unwrap());
        assert!(dev <= TOL, "{scheme:?}: {dev}");
    }
}
