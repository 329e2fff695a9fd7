use num_complex::Complex64;

use super::{coupling::factorial, parity_sign, AngularError};

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
pub fn legendre_p(l: u32, x: f64) -> Result<f64, AngularError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(AngularError::ArgumentOutOfRange(x));
    }
    Ok(legendre_unchecked(l, x))
}

pub(crate) fn legendre_unchecked(l: u32, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut p0, mut p1) = (1.0, x);
            for n in 1..l {
                let n = n as f64;
                let p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` by upward recurrence.
fn jacobi(n: u32, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (a - b + (a + b + 2.0) * x);
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + a + b;
        let a1 = 2.0 * k * (k + a + b) * (c - 2.0);
        let a2 = (c - 1.0) * (a * a - b * b);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn binomial(n: i64, k: i64) -> f64 {
    factorial(n as usize) / (factorial(k as usize) * factorial((n - k) as usize))
}

/// Wigner small-d matrix element `d^J_{m1 m2}(θ)` (Condon–Shortley).
///
/// Evaluated through the Jacobi-polynomial representation, which stays
/// accurate for the larger `J` reached by partial-wave sums.
pub fn reduced_rotation_d(j: u32, m1: i32, m2: i32, theta: f64) -> f64 {
    let (jj, mp, m) = (j as i64, m1 as i64, m2 as i64);
    if mp.abs() > jj || m.abs() > jj {
        return 0.0;
    }
    let candidates = [jj + m, jj - m, jj + mp, jj - mp];
    let k = *candidates.iter().min().unwrap();
    let (a, lambda) = if k == jj + m {
        (mp - m, mp - m)
    } else if k == jj - m {
        (m - mp, 0)
    } else if k == jj + mp {
        (m - mp, 0)
    } else {
        (mp - m, mp - m)
    };
    let b = 2 * jj - 2 * k - a;
    let (s, c) = (0.5 * theta).sin_cos();
    let prefactor = (binomial(2 * jj - k, k + a) / binomial(k + b, b)).sqrt();
    parity_sign(lambda)
        * prefactor
        * s.powi(a as i32)
        * c.powi(b as i32)
        * jacobi(k as u32, a as f64, b as f64, theta.cos())
}

/// Modified spherical harmonic `C_{kq}(β, α) = √(4π/(2k+1)) Y_{kq}(β, α)`.
pub fn modified_spherical_harmonic(k: u32, q: i32, beta: f64, alpha: f64) -> Complex64 {
    let d = reduced_rotation_d(k, q, 0, beta);
    Complex64::from_polar(d, q as f64 * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn legendre_explicit(l: u32, x: f64) -> f64 {
        match l {
            0 => 1.0,
            1 => x,
            2 => (3.0 * x * x - 1.0) / 2.0,
            3 => (5.0 * x.powi(3) - 3.0 * x) / 2.0,
            4 => (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0,
            5 => (63.0 * x.powi(5) - 70.0 * x.powi(3) + 15.0 * x) / 8.0,
            6 => (231.0 * x.powi(6) - 315.0 * x.powi(4) + 105.0 * x * x - 5.0) / 16.0,
            7 => (429.0 * x.powi(7) - 693.0 * x.powi(5) + 315.0 * x.powi(3) - 35.0 * x) / 16.0,
            8 => {
                (6435.0 * x.powi(8) - 12012.0 * x.powi(6) + 6930.0 * x.powi(4) - 1260.0 * x * x + 35.0)
                    / 128.0
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(legendre_p(2, 0.5).unwrap(), -0.125, epsilon = 1e-15);
        for l in 0..=8 {
            for i in 0..=40 {
                let x = -1.0 + i as f64 * 0.05;
                assert_abs_diff_eq!(legendre_p(l, x).unwrap(), legendre_explicit(l, x), epsilon = 1e-13);
            }
        }
        assert!(legendre_p(2, 1.5).is_err());
    }

    #[test]
    fn d_matrix_identities() {
        for j in 0..=6 {
            for i in 0..=30 {
                let th = i as f64 * PI / 30.0;
                assert_abs_diff_eq!(
                    reduced_rotation_d(j, 0, 0, th),
                    legendre_unchecked(j, th.cos()),
                    epsilon = 1e-13
                );
            }
        }
        assert_abs_diff_eq!(reduced_rotation_d(1, 1, 1, 0.0), 1.0, epsilon = 1e-15);
        // closed forms for J = 1
        let th = 0.7f64;
        assert_abs_diff_eq!(reduced_rotation_d(1, 1, 0, th), -th.sin() / 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(reduced_rotation_d(1, 0, 1, th), th.sin() / 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(reduced_rotation_d(1, 1, -1, th), (1.0 - th.cos()) / 2.0, epsilon = 1e-14);
        // d^2_{21}
        assert_abs_diff_eq!(
            reduced_rotation_d(2, 2, 1, th),
            -(1.0 + th.cos()) * th.sin() / 2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn d_matrix_unitarity() {
        for j in 0..=6u32 {
            let jj = j as i32;
            for th in [0.0, 0.3, 1.1, 2.0, PI] {
                for m1 in -jj..=jj {
                    for m2 in -jj..=jj {
                        let s: f64 = (-jj..=jj)
                            .map(|m| reduced_rotation_d(j, m, m1, th) * reduced_rotation_d(j, m, m2, th))
                            .sum();
                        assert_abs_diff_eq!(s, if m1 == m2 { 1.0 } else { 0.0 }, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn d_matrix_orthogonality_by_quadrature() {
        // composite Simpson in θ
        let n = 2000;
        let h = PI / n as f64;
        for (m, mp) in [(0, 0), (1, 0), (1, -1), (2, 1)] {
            for j in 2..=5u32 {
                for jp in 2..=5u32 {
                    let mut s = 0.0;
                    for i in 0..=n {
                        let th = i as f64 * h;
                        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                        s += w * reduced_rotation_d(j, m, mp, th) * reduced_rotation_d(jp, m, mp, th) * th.sin();
                    }
                    s *= h / 3.0;
                    let expected = if j == jp { 2.0 / (2 * j + 1) as f64 } else { 0.0 };
                    assert_abs_diff_eq!(s, expected, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn modified_harmonics() {
        for (b, a) in [(0.0, 0.0), (0.4, 1.0), (2.0, 5.0)] {
            let c = modified_spherical_harmonic(0, 0, b, a);
            assert_abs_diff_eq!(c.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-15);
        }
        let magic = (1.0 / 3.0f64.sqrt()).acos();
        assert!(modified_spherical_harmonic(2, 0, magic, 0.3).norm() < 1e-10);
        assert_abs_diff_eq!(modified_spherical_harmonic(2, 0, 0.0, 0.0).re, 1.0, epsilon = 1e-15);
        // C_{11} = -sinβ e^{iα}/√2
        let c = modified_spherical_harmonic(1, 1, 0.8, 0.5);
        let expected = Complex64::from_polar(-(0.8f64).sin() / 2f64.sqrt(), 0.5);
        assert_abs_diff_eq!((c - expected).norm(), 0.0, epsilon = 1e-14);
        // C_{22} = sqrt(3/8) sin²β e^{2iα}
        let c = modified_spherical_harmonic(2, 2, 0.8, 0.5);
        let expected = Complex64::from_polar((3.0f64 / 8.0).sqrt() * 0.8f64.sin().powi(2), 1.0);
        assert_abs_diff_eq!((c - expected).norm(), 0.0, epsilon = 1e-14);
    }
}
