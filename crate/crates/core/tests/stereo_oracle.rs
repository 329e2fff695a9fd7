//! Stereodynamics checked against quantities built without the helicity
//! machinery: space-fixed amplitudes, closed-form densities, random S inputs.

use std::f64::consts::PI;

mod common;

use common::random_blocks;
use nalgebra::DMatrix;
use num_complex::Complex64;
use stereodyn::angular::clebsch_gordan;
use stereodyn::ccsolver::{SMatrixBlock, Transition};
use stereodyn::stereo::*;

fn cg(j1: u32, m1: i32, j2: u32, m2: i32, j: u32, m: i32) -> f64 {
    if m1.unsigned_abs() > j1 || m2.unsigned_abs() > j2 || m.unsigned_abs() > j {
        return 0.0;
    }
    clebsch_gordan(j1 as i32, m1, j2 as i32, m2, j as i32, m).unwrap()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `Y_{lm}(θ, 0)` from the associated Legendre recurrence (Condon–Shortley phase).
fn ylm(l: u32, m: i32, theta: f64) -> f64 {
    let ma = m.unsigned_abs();
    if ma > l {
        return 0.0;
    }
    let x = theta.cos();
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 1..=ma {
        pmm *= -((2 * i - 1) as f64) * s;
    }
    let plm = if l == ma {
        pmm
    } else {
        let mut p0 = pmm;
        let mut p1 = x * (2 * ma + 1) as f64 * pmm;
        for ll in ma + 2..=l {
            let p2 = ((2 * ll - 1) as f64 * x * p1 - (ll + ma - 1) as f64 * p0) / (ll - ma) as f64;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - ma) / factorial(l + ma)).sqrt();
    let y = norm * plm;
    if m < 0 && ma % 2 == 1 {
        -y
    } else {
        y
    }
}

fn i_pow(n: i64) -> Complex64 {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
        [n.rem_euclid(4) as usize]
}

/// Space-fixed amplitude `F_{j'm' ← jm}(θ, φ = 0)` with `z ∥ k`.
fn space_fixed(blocks: &[SMatrixBlock], t: Transition, k: f64, mp: i32, m: i32, theta: f64) -> Complex64 {
    let mut f = Complex64::new(0.0, 0.0);
    for b in blocks {
        let chans: Vec<_> = b.open_channels().enumerate().collect();
        for &(ii, (j, l, _)) in &chans {
            if j != t.j {
                continue;
            }
            for &(oo, (jp, lp, _)) in &chans {
                if jp != t.jp {
                    continue;
                }
                let mut tel = b.s[(oo, ii)];
                if oo == ii {
                    tel -= 1.0;
                }
                let ml = m - mp;
                let c = cg(j, m, l, 0, b.total_j, m) * cg(jp, mp, lp, ml, b.total_j, m);
                if c == 0.0 {
                    continue;
                }
                f += i_pow(l as i64 - lp as i64)
                    * (4.0 * PI * (2 * l + 1) as f64).sqrt()
                    * c
                    * ylm(lp, ml, theta)
                    * tel;
            }
        }
    }
    f / Complex64::new(0.0, 2.0 * k)
}

#[test]
fn helicity_amplitudes_match_space_fixed_density_matrix() {
    let blocks = random_blocks(7, |_, _| true);
    let grid = ThetaGrid::gauss_legendre(9).unwrap();
    for t in [Transition::new(2, 1), Transition::new(2, 2), Transition::new(2, 0), Transition::new(1, 2)] {
        let h = helicity_transform(&blocks, t).unwrap();
        let amps = amplitudes(&h, &grid).unwrap();
        let (j, jp) = (t.j as i32, t.jp as i32);
        let mut scale: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for (i, &theta) in grid.theta.iter().enumerate() {
            for m1 in -j..=j {
                for m2 in -j..=j {
                    let mut sf = Complex64::new(0.0, 0.0);
                    let mut hel = Complex64::new(0.0, 0.0);
                    for mp in -jp..=jp {
                        sf += space_fixed(&blocks, t, h.k_in, mp, m1, theta)
                            * space_fixed(&blocks, t, h.k_in, mp, m2, theta).conj();
                        hel += amps.get(mp, m1)[i] * amps.get(mp, m2)[i].conj();
                    }
                    scale = scale.max(sf.norm());
                    worst = worst.max((sf - hel).norm());
                }
            }
        }
        assert!(worst < 1e-12 * scale, "{t:?}: {worst:e} vs {scale:e}");
    }
}

#[test]
fn forward_amplitude_is_helicity_diagonal() {
    let blocks = random_blocks(3, |_, _| true);
    let grid = ThetaGrid::uniform(3).unwrap();
    let amps = amplitudes(&helicity_transform(&blocks, Transition::new(2, 1)).unwrap(), &grid).unwrap();
    for mp in -1..=1 {
        for m in -2..=2 {
            if m != mp {
                assert!(amps.get(mp, m)[0].norm() < 1e-12);
            }
        }
    }
}

#[test]
fn omega_free_blocks_never_feed_omega_zero() {
    for total_j in 1..=4u32 {
        for parity in [1, -1] {
            let blocks = random_blocks(11 + total_j as u64, |jj, p| jj == total_j && p == parity);
            let block = blocks.iter().find(|b| b.total_j == total_j && b.parity == parity).unwrap();
            let grid = ThetaGrid::gauss_legendre(16).unwrap();
            for t in [Transition::new(2, 1), Transition::new(2, 2), Transition::new(2, 0)] {
                let amps = amplitudes(&helicity_transform(&blocks, t).unwrap(), &grid).unwrap();
                let zero: f64 = (-(t.jp as i32)..=t.jp as i32)
                    .flat_map(|op| amps.get(op, 0).iter().map(|f| f.norm()))
                    .fold(0.0, f64::max);
                if block.basis.helicity_parity() == -1 {
                    assert!(zero < 1e-12, "J={total_j} parity {parity} {t:?}: {zero:e}");
                }
            }
        }
    }
}

#[test]
fn moment_ensemble_has_twelve_parameters_eight_even() {
    let grid = ThetaGrid::gauss_legendre(32).unwrap();
    let t = Transition::new(2, 1);
    let mut rows_all = Vec::new();
    let mut rows_even = Vec::new();
    for seed in 0..40 {
        let blocks = random_blocks(100 + seed, |_, _| true);
        let m = polarization_moments(&pddcs(&amplitudes(&helicity_transform(&blocks, t).unwrap(), &grid).unwrap()))
            .unwrap();
        let mut all = Vec::new();
        let mut even = Vec::new();
        for k in 1..=4u32 {
            for q in -(k as i32)..=k as i32 {
                let v = m.get(k, q).unwrap();
                all.extend([v.re, v.im]);
                if k % 2 == 0 {
                    even.extend([v.re, v.im]);
                }
            }
        }
        rows_all.push(all);
        rows_even.push(even);
    }
    let rank = |rows: &Vec<Vec<f64>>| {
        let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
        let sv = m.svd(false, false).singular_values;
        let top = sv.max();
        sv.iter().filter(|&&s| s > 1e-9 * top).count()
    };
    assert_eq!(rank(&rows_all), 12);
    assert_eq!(rank(&rows_even), 8);
}

#[test]
fn beta_zero_preparation_is_omega_zero_scattering() {
    let blocks = random_blocks(21, |_, _| true);
    let grid = ThetaGrid::gauss_legendre(40).unwrap();
    let t = Transition::new(2, 1);
    let amps = amplitudes(&helicity_transform(&blocks, t).unwrap(), &grid).unwrap();
    let d = prep_dcs(&pddcs(&amps), &Preparation::directed(2, 0.0, 0.0).unwrap()).unwrap();
    for i in 0..grid.len() {
        let omega0: f64 = (-1..=1).map(|op| amps.get(op, 0)[i].norm_sqr()).sum();
        assert!((d.values[i] - omega0).abs() <= 1e-8 * omega0.max(1e-300), "{i}");
    }
}

#[test]
fn preparation_ics_is_alpha_free_and_legendre_in_beta() {
    let blocks = random_blocks(5, |_, _| true);
    let grid = ThetaGrid::gauss_legendre(40).unwrap();
    let ms = pddcs(&amplitudes(&helicity_transform(&blocks, Transition::new(2, 1)).unwrap(), &grid).unwrap());
    let pm = polarization_moments(&ms).unwrap();
    let betas = [0.0, 30.0, 60.0, 120.0, 165.0];
    let mut values = Vec::new();
    for &b in &betas {
        let a = prep_ics_numeric(&ms, &Preparation::directed(2, b, 15.0).unwrap(), 11).unwrap();
        let c = prep_ics_numeric(&ms, &Preparation::directed(2, b, 250.0).unwrap(), 11).unwrap();
        assert!((a - c).abs() <= 1e-10 * a, "{b}: {a} {c}");
        let closed = prep_ics(&pm, &Preparation::directed(2, b, 0.0).unwrap()).unwrap();
        assert!((a - closed).abs() <= 1e-10 * a);
        values.push(a);
    }
    // fit c0 + c2 P2 + c4 P4 to five points; the residual must vanish
    let p2 = |x: f64| 0.5 * (3.0 * x * x - 1.0);
    let p4 = |x: f64| (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0;
    let a = DMatrix::from_fn(5, 3, |i, j| {
        let x = betas[i].to_radians().cos();
        [1.0, p2(x), p4(x)][j]
    });
    let y = nalgebra::DVector::from_vec(values.clone());
    let coeffs = a.clone().svd(true, true).solve(&y, 1e-14).unwrap();
    let resid = (&a * coeffs - &y).amax();
    assert!(resid < 1e-10 * y.amax(), "{resid:e}");
}

#[test]
fn magic_angle_recovers_unpolarized_when_rank_four_vanishes() {
    let mut v = vec![Complex64::new(0.0, 0.0); 25];
    v[moment_index(0, 0)] = Complex64::new(1.0, 0.0);
    v[moment_index(2, 0)] = Complex64::new(-0.31, 0.0);
    let pm = PolarizationMoments::from_values(2, 0.1, 42.0, v).unwrap();
    let magic = prep_ics(&pm, &Preparation::directed(2, MAGIC_ANGLE_DEG, 0.0).unwrap()).unwrap();
    let unpol = prep_ics(&pm, &Preparation::unpolarized(2)).unwrap();
    assert!((magic - unpol).abs() < 1e-12 * unpol);
}

#[test]
fn m_zero_portrait_is_y20_squared() {
    let p = portrait(&PolarizationMoments::pure_state(2, 0), 24, 8).unwrap();
    for (i, &t) in p.theta.theta.iter().enumerate() {
        let c = t.cos();
        let exact = 5.0 / (16.0 * PI) * (3.0 * c * c - 1.0).powi(2);
        for m in 0..8 {
            assert!((p.at(i, m) - exact).abs() < 1e-12, "{t}");
        }
    }
    assert!((p.normalization() - 1.0).abs() < 1e-12);
}

#[test]
fn side_on_state_has_equatorial_portrait() {
    // |j=2, m=±2⟩ mixture along z: density ∝ sin⁴θ
    let mut v = PolarizationMoments::pure_state(2, 2).values().to_vec();
    let minus = PolarizationMoments::pure_state(2, -2);
    for (a, b) in v.iter_mut().zip(minus.values()) {
        *a = 0.5 * (*a + b);
    }
    let pm = PolarizationMoments::from_values(2, 0.0, 1.0, v).unwrap();
    assert!(pm.get(2, 0).unwrap().re > 0.0);
    let p = portrait(&pm, 24, 4).unwrap();
    for (i, &t) in p.theta.theta.iter().enumerate() {
        let exact = 15.0 / (32.0 * PI) * t.sin().powi(4);
        assert!((p.at(i, 0) - exact).abs() < 1e-12);
    }
}
