use proptest::prelude::*;

use bdris_crb::fisher::{crb_via_inverse, fim_blocks};
use bdris_crb::linalg::{expm_skew, random_skew_hermitian, seeded_rng, skew_residual, unitarity_report};
use bdris_crb::optim::{euclidean_gradient, geodesic_gradient, unitary_upper_bound};
use bdris_crb::scene::{random_phi, random_scene};
use bdris_crb::{build_channel, objective_g, Architecture, ScatteringMatrix, C64};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn exp_of_skew_is_unitary(seed in any::<u64>(), n in 1usize..10, mu in -50.0f64..50.0) {
        let s = random_skew_hermitian(n, &mut seeded_rng(seed));
        let r = expm_skew(&s, mu).unwrap();
        prop_assert!(unitarity_report(&r).frobenius_drift <= 1e-12 * (1.0 + mu.abs()) * n as f64);
    }

    #[test]
    fn geodesic_direction_is_skew(seed in any::<u64>(), n_bs in 1usize..6, n_r in 1usize..9) {
        let mut rng = seeded_rng(seed);
        let scene = random_scene(n_bs, n_r, &mut rng);
        let phi = random_phi(n_r, &mut rng);
        let euc = euclidean_gradient(&phi, &scene).unwrap();
        let dir = geodesic_gradient(phi.matrix(), &euc).unwrap();
        prop_assert!(skew_residual(&dir) <= 1e-12);
    }

    #[test]
    fn objective_ignores_global_phase(seed in any::<u64>(), psi in 0.0f64..6.3) {
        let mut rng = seeded_rng(seed);
        let scene = random_scene(3, 4, &mut rng);
        let phi = random_phi(4, &mut rng);
        let a = objective_g(&build_channel(&scene, &phi).unwrap()).unwrap();
        let b = objective_g(&build_channel(&scene, &phi.with_global_phase(psi)).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn objective_scales_with_gain(seed in any::<u64>(), k in 1e-4f64..1e4, phase in 0.0f64..6.3) {
        let mut rng = seeded_rng(seed);
        let scene = random_scene(2, 3, &mut rng);
        let phi = random_phi(3, &mut rng);
        let a = objective_g(&build_channel(&scene, &phi).unwrap()).unwrap();
        let scaled = scene.with_alpha(scene.alpha * C64::from_polar(k, phase));
        let b = objective_g(&build_channel(&scaled, &phi).unwrap()).unwrap();
        prop_assert!((b / (k * k) - a).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn no_architecture_beats_the_unitary_bound(seed in any::<u64>(), log_n in 0u32..4, log_q in 0u32..4) {
        let n = 1usize << log_n;
        let q = 1usize << log_q.min(log_n);
        let mut rng = seeded_rng(seed);
        let scene = random_scene(3, n, &mut rng);
        let arch = Architecture::from_group_size(q, n).unwrap();
        let phi = ScatteringMatrix::random_with(n, arch, &mut rng).unwrap();
        let g = objective_g(&build_channel(&scene, &phi).unwrap()).unwrap();
        prop_assert!(g <= unitary_upper_bound(&scene).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn crb_matches_inverse_fim(seed in any::<u64>(), n_bs in 2usize..6, n_r in 2usize..9) {
        let mut rng = seeded_rng(seed);
        let scene = random_scene(n_bs, n_r, &mut rng);
        let phi = random_phi(n_r, &mut rng);
        let blocks = fim_blocks(&build_channel(&scene, &phi).unwrap(), &scene).unwrap();
        prop_assert!(blocks.crb_theta > 0.0);
        let inv = crb_via_inverse(&blocks);
        prop_assert!((inv - blocks.crb_theta).abs() <= 1e-8 * blocks.crb_theta);
    }

    #[test]
    fn single_antenna_carries_no_angle_information(seed in any::<u64>(), n_r in 1usize..9) {
        // h and h_dot are scalars, so the gain absorbs any change of theta
        let mut rng = seeded_rng(seed);
        let scene = random_scene(1, n_r, &mut rng);
        let phi = random_phi(n_r, &mut rng);
        let blocks = fim_blocks(&build_channel(&scene, &phi).unwrap(), &scene).unwrap();
        prop_assert_eq!(blocks.g_value, 0.0);
        prop_assert!(blocks.crb_theta.is_infinite());
    }
}
