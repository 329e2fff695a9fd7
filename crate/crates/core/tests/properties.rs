//! Invariants under random inputs.

mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stereodyn::angular::{clebsch_gordan, reduced_rotation_d};
use stereodyn::ccsolver::{s_from_k, Transition};
use stereodyn::stereo::*;

fn cg(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    clebsch_gordan(j1, m1, j2, m2, j, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clebsch_gordan_rows_are_orthonormal(j1 in 0i32..6, j2 in 0i32..6, m in -6i32..=6) {
        for j in (j1 - j2).abs()..=j1 + j2 {
            for jj in (j1 - j2).abs()..=j1 + j2 {
                if m.abs() > j.min(jj) {
                    continue;
                }
                let dot: f64 = (-j1..=j1).map(|m1| cg(j1, m1, j2, m - m1, j, m) * cg(j1, m1, j2, m - m1, jj, m)).sum();
                let want = if j == jj { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_matrix_is_orthogonal(j in 0u32..8, beta in 0.0f64..std::f64::consts::PI) {
        let n = 2 * j as i32 + 1;
        let d = DMatrix::from_fn(n as usize, n as usize, |a, b| reduced_rotation_d(j, a as i32 - j as i32, b as i32 - j as i32, beta));
        let err = (&d * d.transpose() - DMatrix::identity(n as usize, n as usize)).amax();
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn s_from_symmetric_k_is_unitary_and_symmetric(seed in any::<u64>(), n in 1usize..8) {
        let s = common::random_s(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let id = DMatrix::<Complex64>::identity(n, n);
        prop_assert!((s.adjoint() * &s - id).camax() < 1e-12);
        prop_assert!((&s - s.transpose()).camax() < 1e-12);
        let k = DMatrix::<f64>::zeros(n, n);
        prop_assert_eq!(s_from_k(&k), DMatrix::<Complex64>::identity(n, n));
    }

    #[test]
    fn observables_of_random_s_are_physical(
        seed in any::<u64>(),
        beta in 0.0f64..=180.0,
        alpha in 0.0f64..360.0,
    ) {
        let blocks = common::random_blocks(seed, |_, _| true);
        let grid = ThetaGrid::gauss_legendre(24).unwrap();
        let t = Transition::new(2, 1);
        let amps = amplitudes(&helicity_transform(&blocks, t).unwrap(), &grid).unwrap();
        let ms = pddcs(&amps);
        prop_assert!(ms.hermiticity_defect() < 1e-12);
        let d = prep_dcs(&ms, &Preparation::directed(2, beta, alpha).unwrap()).unwrap();
        prop_assert!(d.values.iter().all(|&v| v >= 0.0));
        let pm = polarization_moments(&ms).unwrap();
        prop_assert!((pm.get(0, 0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // the prepared ICS lies between the extremes set by pure |m| states
        let ics = prep_ics(&pm, &Preparation::directed(2, beta, alpha).unwrap()).unwrap();
        prop_assert!(ics >= 0.0 && ics <= 5.0 * pm.sigma);
        let p = portrait(&pm, 16, 12).unwrap();
        prop_assert!((p.normalization() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn icses_agree_between_quadrature_and_direct_moments(seed in any::<u64>()) {
        let blocks = common::random_blocks(seed, |_, _| true);
        let t = Transition::new(2, 0);
        let h = helicity_transform(&blocks, t).unwrap();
        let grid = ThetaGrid::gauss_legendre(20).unwrap();
        let pm = polarization_moments(&pddcs(&amplitudes(&h, &grid).unwrap())).unwrap();
        let direct = direct_moments(&h).unwrap();
        prop_assert!((pm.sigma - direct.sigma).abs() < 1e-12 * direct.sigma);
        for k in 0..=4u32 {
            prop_assert!((pm.get(k, 0).unwrap().re - direct.s0[k as usize]).abs() < 1e-12);
        }
    }
}
