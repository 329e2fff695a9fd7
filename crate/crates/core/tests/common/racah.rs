//! Exact Racah sums in rational arithmetic. Each coefficient is
//! `sign · sqrt(p) · s` with rational `p` and `s`; only the final square root
//! is taken in floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn fact(n: i64) -> BigInt {
    assert!(n >= 0);
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

fn signed_sqrt(s: &BigRational, p: &BigRational) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let mag = to_f64(&s.abs()) * to_f64(p).sqrt();
    if s.is_negative() {
        -mag
    } else {
        mag
    }
}

fn triangle(a: i64, b: i64, c: i64) -> bool {
    a + b >= c && a + c >= b && b + c >= a
}

fn delta(a: i64, b: i64, c: i64) -> BigRational {
    ratio(fact(a + b - c) * fact(a - b + c) * fact(-a + b + c), fact(a + b + c + 1))
}

/// `<j1 m1 j2 m2 | j m>`.
pub fn cg(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || !triangle(j1, j2, j) || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    let p = ratio(BigInt::from(2 * j + 1), BigInt::one())
        * delta(j1, j2, j)
        * ratio(fact(j1 + m1) * fact(j1 - m1) * fact(j2 + m2) * fact(j2 - m2) * fact(j + m) * fact(j - m), BigInt::one());
    let mut s = BigRational::zero();
    for k in 0..=(j1 + j2 + j) {
        let d = [j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k];
        if d.iter().any(|&x| x < 0) {
            continue;
        }
        let den = d.iter().fold(fact(k), |acc, &x| acc * fact(x));
        let term = ratio(BigInt::one(), den);
        if k % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    signed_sqrt(&s, &p)
}

/// `(j1 j2 j3; m1 m2 m3)`.
pub fn three_j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase / ((2 * j3 + 1) as f64).sqrt() * cg(j1, m1, j2, m2, j3, -m3)
}

/// `{j1 j2 j3; j4 j5 j6}`.
pub fn six_j(j1: i64, j2: i64, j3: i64, j4: i64, j5: i64, j6: i64) -> f64 {
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return 0.0;
    }
    let p = triads.iter().fold(BigRational::one(), |acc, &(a, b, c)| acc * delta(a, b, c));
    let lo = triads.iter().map(|&(a, b, c)| a + b + c).max().unwrap();
    let hi = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4].into_iter().min().unwrap();
    let mut s = BigRational::zero();
    for t in lo..=hi {
        let mut den = BigInt::one();
        for &(a, b, c) in &triads {
            den *= fact(t - a - b - c);
        }
        den *= fact(j1 + j2 + j4 + j5 - t) * fact(j2 + j3 + j5 + j6 - t) * fact(j3 + j1 + j6 + j4 - t);
        let term = ratio(fact(t + 1), den);
        if t % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    signed_sqrt(&s, &p)
}
