use std::sync::OnceLock;

use super::{parity_sign, triangle, AngularError};

/// Largest `n` for which `n!` is tabulated from exact 128-bit integers.
/// Beyond it values come from repeated multiplication up to 170!, and
/// `ln_factorial` switches to accumulated logarithms.
pub const EXACT_FACTORIAL_MAX: usize = 34;

const TABLE_MAX: usize = 170;

fn table() -> &'static [f64; TABLE_MAX + 1] {
    static TABLE: OnceLock<[f64; TABLE_MAX + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; TABLE_MAX + 1];
        let mut exact: u128 = 1;
        for n in 1..=TABLE_MAX {
            if n <= EXACT_FACTORIAL_MAX {
                exact *= n as u128;
                t[n] = exact as f64;
            } else {
                t[n] = t[n - 1] * n as f64;
            }
        }
        t
    })
}

/// `n!` as a double. Exact (correctly rounded) for `n ≤ 34`.
pub fn factorial(n: usize) -> f64 {
    if n <= TABLE_MAX {
        table()[n]
    } else {
        ln_factorial(n).exp()
    }
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= TABLE_MAX {
        table()[n].ln()
    } else {
        table()[TABLE_MAX].ln() + ((TABLE_MAX + 1)..=n).map(|k| (k as f64).ln()).sum::<f64>()
    }
}

#[inline]
fn fact(n: i64) -> f64 {
    debug_assert!(n >= 0);
    factorial(n as usize)
}

fn delta(a: i64, b: i64, c: i64) -> f64 {
    (fact(a + b - c) * fact(a - b + c) * fact(-a + b + c) / fact(a + b + c + 1)).sqrt()
}

/// Wigner 3j symbol for integer arguments; zero whenever a selection rule fails.
pub(crate) fn three_j(j1: u32, j2: u32, j3: u32, m1: i32, m2: i32, m3: i32) -> f64 {
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) {
        return 0.0;
    }
    let (j1, j2, j3) = (j1 as i64, j2 as i64, j3 as i64);
    let (m1, m2, m3) = (m1 as i64, m2 as i64, m3 as i64);
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if m1 == 0 && m2 == 0 && (j1 + j2 + j3) % 2 == 1 {
        return 0.0;
    }

    let t_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let t_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    for t in t_min..=t_max {
        let den = fact(t)
            * fact(j3 - j2 + t + m1)
            * fact(j3 - j1 + t - m2)
            * fact(j1 + j2 - j3 - t)
            * fact(j1 - t - m1)
            * fact(j2 - t + m2);
        sum += parity_sign(t) / den;
    }
    let norm = (fact(j1 + m1)
        * fact(j1 - m1)
        * fact(j2 + m2)
        * fact(j2 - m2)
        * fact(j3 + m3)
        * fact(j3 - m3))
    .sqrt();
    parity_sign(j1 - j2 - m3) * delta(j1, j2, j3) * norm * sum
}

/// Clebsch–Gordan coefficient `⟨j1 m1, j2 m2 | j m⟩`.
pub(crate) fn cg(j1: u32, m1: i32, j2: u32, m2: i32, j: u32, m: i32) -> f64 {
    if m1 + m2 != m {
        return 0.0;
    }
    let phase = parity_sign(j1 as i64 - j2 as i64 + m as i64);
    phase * ((2 * j + 1) as f64).sqrt() * three_j(j1, j2, j, m1, m2, -m)
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub(crate) fn six_j(j1: u32, j2: u32, j3: u32, j4: u32, j5: u32, j6: u32) -> f64 {
    if !(triangle(j1, j2, j3) && triangle(j1, j5, j6) && triangle(j4, j2, j6) && triangle(j4, j5, j3))
    {
        return 0.0;
    }
    let [j1, j2, j3, j4, j5, j6] = [j1, j2, j3, j4, j5, j6].map(|x| x as i64);
    let a = [j1 + j2 + j3, j1 + j5 + j6, j4 + j2 + j6, j4 + j5 + j3];
    let b = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4];
    let t_min = *a.iter().max().unwrap();
    let t_max = *b.iter().min().unwrap();
    let mut sum = 0.0;
    for t in t_min..=t_max {
        let den = a.iter().map(|&x| fact(t - x)).product::<f64>()
            * b.iter().map(|&x| fact(x - t)).product::<f64>();
        sum += parity_sign(t) * fact(t + 1) / den;
    }
    delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3) * sum
}

fn non_negative(name: &'static str, value: i32) -> Result<u32, AngularError> {
    u32::try_from(value).map_err(|_| AngularError::NegativeMomentum { name, value })
}

fn projection(j: i32, m: i32) -> Result<(), AngularError> {
    if m.abs() > j {
        Err(AngularError::ProjectionOutOfRange { j, m })
    } else {
        Ok(())
    }
}

/// `⟨j1 m1, j2 m2 | j m⟩` in the Condon–Shortley convention.
///
/// Returns exactly `0.0` when the triangle rule or `m1 + m2 = m` fails.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> Result<f64, AngularError> {
    let (a, b, c) = (non_negative("j1", j1)?, non_negative("j2", j2)?, non_negative("j", j)?);
    projection(j1, m1)?;
    projection(j2, m2)?;
    projection(j, m)?;
    Ok(cg(a, m1, b, m2, c, m))
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn wigner_3j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> Result<f64, AngularError> {
    let (a, b, c) = (non_negative("j1", j1)?, non_negative("j2", j2)?, non_negative("j3", j3)?);
    projection(j1, m1)?;
    projection(j2, m2)?;
    projection(j3, m3)?;
    Ok(three_j(a, b, c, m1, m2, m3))
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`; zero on any triangle violation.
pub fn wigner_6j(j1: i32, j2: i32, j3: i32, j4: i32, j5: i32, j6: i32) -> Result<f64, AngularError> {
    Ok(six_j(
        non_negative("j1", j1)?,
        non_negative("j2", j2)?,
        non_negative("j3", j3)?,
        non_negative("j4", j4)?,
        non_negative("j5", j5)?,
        non_negative("j6", j6)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn factorial_table_boundary() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(10), 3_628_800.0);
        assert_eq!(factorial(20), 2_432_902_008_176_640_000.0);
        let rel = (ln_factorial(200) - factorial(170).ln() - (171..=200).map(|k| (k as f64).ln()).sum::<f64>()).abs();
        assert!(rel < 1e-9);
    }

    #[test]
    fn clebsch_gordan_reference_values() {
        assert_abs_diff_eq!(clebsch_gordan(2, 0, 0, 0, 2, 0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            clebsch_gordan(2, 0, 2, 0, 2, 0).unwrap(),
            -(2.0f64 / 7.0).sqrt(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            clebsch_gordan(1, 1, 1, -1, 0, 0).unwrap(),
            1.0 / 3.0f64.sqrt(),
            epsilon = 1e-14
        );
        assert_eq!(clebsch_gordan(2, 0, 1, 0, 2, 0).unwrap(), 0.0);
    }

    #[test]
    fn negative_momentum_is_a_domain_error() {
        assert!(matches!(
            clebsch_gordan(-1, 0, 1, 0, 1, 0),
            Err(AngularError::NegativeMomentum { .. })
        ));
        assert!(wigner_6j(1, 1, 1, 1, 1, -2).is_err());
        assert!(wigner_3j(1, 1, 1, 2, 0, -2).is_err());
    }

    #[test]
    fn three_j_reference_values() {
        assert_abs_diff_eq!(wigner_3j(2, 2, 4, 0, 0, 0).unwrap(), (2.0f64 / 35.0).sqrt(), epsilon = 1e-14);
        assert_eq!(wigner_3j(1, 1, 1, 0, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn six_j_with_zero_argument() {
        // {a b c; 0 c b} = (-1)^(a+b+c) / sqrt((2b+1)(2c+1))
        for j in 0..=4 {
            for l in 0..=4 {
                for a in 0..=(j + l) {
                    if !triangle(a, j, l) {
                        continue;
                    }
                    let expected = parity_sign((a + j + l) as i64)
                        / (((2 * j + 1) * (2 * l + 1)) as f64).sqrt();
                    assert_abs_diff_eq!(six_j(a, j, l, 0, l, j), expected, epsilon = 1e-13);
                }
            }
        }
        assert_eq!(six_j(1, 1, 5, 1, 1, 1), 0.0);
    }

    #[test]
    fn six_j_orthogonality() {
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                for c in 0..=3u32 {
                    for d in 0..=3u32 {
                        for p in 0..=6u32 {
                            for q in 0..=6u32 {
                                if !(triangle(a, d, p) && triangle(c, b, p) && triangle(a, d, q) && triangle(c, b, q)) {
                                    continue;
                                }
                                let sum: f64 = (0..=6u32)
                                    .map(|x| (2 * x + 1) as f64 * six_j(a, b, x, c, d, p) * six_j(a, b, x, c, d, q))
                                    .sum();
                                let expected = if p == q { 1.0 / (2 * p + 1) as f64 } else { 0.0 };
                                assert_abs_diff_eq!(sum, expected, epsilon = 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn clebsch_gordan_orthogonality() {
        for j1 in 0..=4u32 {
            for j2 in 0..=4u32 {
                for j in 0..=8u32 {
                    for jp in 0..=8u32 {
                        for m in -(j as i32)..=(j as i32) {
                            for mp in -(jp as i32)..=(jp as i32) {
                                let mut sum = 0.0;
                                for m1 in -(j1 as i32)..=(j1 as i32) {
                                    for m2 in -(j2 as i32)..=(j2 as i32) {
                                        sum += cg(j1, m1, j2, m2, j, m) * cg(j1, m1, j2, m2, jp, mp);
                                    }
                                }
                                let expected = if j == jp && m == mp && triangle(j1, j2, j) { 1.0 } else { 0.0 };
                                assert_abs_diff_eq!(sum, expected, epsilon = 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }
}
