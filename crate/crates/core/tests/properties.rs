use nalgebra::{DMatrix, DVector};
use phaseclass::bogoliubov::{apply, compose, one_mode_squeeze, two_mode_squeeze, BogoliubovMap};
use phaseclass::dynamics::{evolve, time_grid, PotentialModel};
use phaseclass::entropy::{
    coarse_grain, relative_info, relative_sw_covariance, relative_sw_gaussian, shannon_discrete, sw_entropy_from_bogoliubov,
    sw_entropy_gaussian, sw_entropy_pure, vn_entropy_gaussian, ProbVector,
};
use phaseclass::linalg::omega;
use phaseclass::modes::{entropy_per_mode, n_from_r, r_from_n};
use phaseclass::state::{covariance_from_k, k_from_covariance};
use phaseclass::{Conventions, CovarianceState, GaussianPureState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn conv_strategy() -> impl Strategy<Value = Conventions<f64>> {
    (0.2f64..3.0, 0.05f64..3.0).prop_map(|(h, s)| Conventions::new(h, s).unwrap())
}

fn random_map(seed: u64, n: usize, r_max: f64) -> BogoliubovMap<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BogoliubovMap::random(n, 4 * n, r_max, &mut || rng.gen())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lieb_bound(seed in any::<u64>(), n in 1usize..4, cv in conv_strategy(), r_max in 0.0f64..1.5) {
        let st = apply(&random_map(seed, n, r_max), &GaussianPureState::vacuum(n, cv).unwrap()).unwrap();
        let e = sw_entropy_pure(&st);
        prop_assert!(e.absolute >= n as f64 - 1e-9);
        prop_assert!(e.excess >= 0.5 * st.k().unwrap().norm_squared() - 1e-9);
    }

    #[test]
    fn entropy_routes_agree(seed in any::<u64>(), n in 1usize..3, cv in conv_strategy()) {
        let map = random_map(seed, n, 1.0);
        let st = apply(&map, &GaussianPureState::vacuum(n, cv).unwrap()).unwrap();
        let a = sw_entropy_from_bogoliubov(&map).absolute;
        let b = sw_entropy_gaussian(&st.covariance(), &cv).unwrap().absolute;
        prop_assert!((a - b).abs() < 1e-8 * (1.0 + a));
    }

    #[test]
    fn weyl_translation_invariance(seed in any::<u64>(), q in -20.0f64..20.0, p in -20.0f64..20.0, cv in conv_strategy()) {
        let st = apply(&random_map(seed, 1, 1.0), &GaussianPureState::vacuum(1, cv).unwrap()).unwrap();
        let moved = st.translated(DVector::from_element(1, q), DVector::from_element(1, p));
        prop_assert!((sw_entropy_pure(&st).absolute - sw_entropy_pure(&moved).absolute).abs() < 1e-12);
    }

    #[test]
    fn squeeze_phase_does_not_change_entropy(r in 0.0f64..3.0, phi in 0.0f64..6.3) {
        let a = sw_entropy_from_bogoliubov(&one_mode_squeeze(r, phi).unwrap()).absolute;
        prop_assert!((a - 1.0 - r.cosh().ln()).abs() < 1e-10);
        let b = sw_entropy_from_bogoliubov(&two_mode_squeeze(r, phi).unwrap()).excess;
        prop_assert!((b - 2.0 * r.cosh().ln()).abs() < 1e-9);
    }

    #[test]
    fn bogoliubov_identities_and_symplectic_form(s1 in any::<u64>(), s2 in any::<u64>(), cv in conv_strategy()) {
        let a = random_map(s1, 2, 0.8);
        let b = random_map(s2, 2, 0.8);
        let c = compose(&b, &a).unwrap();
        prop_assert!(c.residuals().max() < 1e-9);
        let r = c.real_symplectic(&cv);
        let w = omega::<f64>(2);
        let defect = (&r * &w * r.transpose() - &w).norm() / (1.0 + r.norm_squared());
        prop_assert!(defect < 1e-10);
    }

    #[test]
    fn covariance_k_round_trip(seed in any::<u64>(), cv in conv_strategy()) {
        let st = apply(&random_map(seed, 2, 0.9), &GaussianPureState::vacuum(2, cv).unwrap()).unwrap();
        let k = st.k().unwrap();
        let back = k_from_covariance(&covariance_from_k(&k, &cv).unwrap(), &cv).unwrap();
        prop_assert!((back - k).norm() < 1e-8);
    }

    #[test]
    fn sw_dominates_von_neumann(seed in any::<u64>(), t in 1.0f64..10.0, cv in conv_strategy()) {
        let r = random_map(seed, 1, 1.0).real_symplectic(&cv);
        let sigma = &r * (cv.coherent_covariance(1) * t) * r.transpose();
        let st = CovarianceState::new(DVector::zeros(2), (&sigma + sigma.transpose()) * 0.5, &cv).unwrap();
        let i = sw_entropy_gaussian(&st, &cv).unwrap().absolute;
        let s = vn_entropy_gaussian(&st, &cv).unwrap();
        prop_assert!(i >= s - 1e-9);
        prop_assert!(i >= 1.0 - 1e-9);
    }

    #[test]
    fn relative_sw_is_kl(seed in any::<u64>(), dq in -2.0f64..2.0, dp in -2.0f64..2.0, cv in conv_strategy()) {
        let reference = GaussianPureState::vacuum(1, cv).unwrap();
        let target = apply(&random_map(seed, 1, 1.0), &reference).unwrap()
            .translated(DVector::from_element(1, dq), DVector::from_element(1, dp));
        let a = relative_sw_gaussian(&reference, &target, &cv).unwrap();
        let b = relative_sw_covariance(&reference.covariance(), &target.covariance(), &cv).unwrap();
        prop_assert!(a >= -1e-12);
        prop_assert!((a - b).abs() < 1e-8 * (1.0 + a));
    }

    #[test]
    fn coarse_graining_lowers_information(w in prop::collection::vec(0.01f64..1.0, 2..12)) {
        let total: f64 = w.iter().sum();
        let p = ProbVector::new(w.iter().map(|x| x / total).collect()).unwrap();
        let blocks: Vec<Vec<usize>> = (0..p.len()).collect::<Vec<_>>().chunks(2).map(|c| c.to_vec()).collect();
        let coarse = coarse_grain(&p, &blocks).unwrap();
        prop_assert!(shannon_discrete(&coarse) <= shannon_discrete(&p) + 1e-12);
        prop_assert!(relative_info(&p, &p).unwrap().abs() < 1e-12);
        prop_assert!(relative_info(&p, &ProbVector::uniform(p.len())).unwrap() >= -1e-12);
    }

    #[test]
    fn mode_maps_invert(r in 0.0f64..6.0) {
        let n = n_from_r(r).unwrap();
        prop_assert!((r_from_n(n).unwrap() - r).abs() < 1e-9 * (1.0 + r));
        prop_assert!((entropy_per_mode(n).unwrap() - 1.0 - 2.0 * r.cosh().ln()).abs() < 1e-12 * (1.0 + r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadratic_flow_is_symplectic(stiff in -1.0f64..2.0, m in 0.3f64..3.0) {
        let cv = Conventions::<f64>::default();
        let pot = PotentialModel::quadratic(DMatrix::from_element(1, 1, stiff), DVector::from_element(1, m)).unwrap();
        let st = GaussianPureState::coherent(DVector::from_element(1, 0.5), DVector::from_element(1, -0.2), cv).unwrap();
        let evo = evolve(&st, &pot, &time_grid(0.0, 3.0, 12), &cv).unwrap();
        prop_assert!(evo.trajectory.symplectic_defect() < 1e-7);
        prop_assert!(evo.entropy.absolute.iter().all(|i| *i >= 1.0 - 1e-9));
    }
}
