use super::AngularError;

/// Riccati–Bessel values and derivatives at one argument.
///
/// `j = x j_L(x)`, `n = −x y_L(x)`; derivatives are with respect to `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiBessel {
    pub j: f64,
    pub n: f64,
    pub dj: f64,
    pub dn: f64,
}

/// Riccati–Bessel functions `ĵ_L(x)`, `n̂_L(x)` and their derivatives.
///
/// `n̂` always uses upward recurrence. `ĵ` uses upward recurrence for
/// `x > L` and Miller's downward recurrence otherwise.
pub fn riccati_bessel(l: u32, x: f64) -> Result<RiccatiBessel, AngularError> {
    if x.is_nan() || x <= 0.0 {
        return Err(AngularError::NonPositiveArgument(x));
    }
    Ok(riccati_bessel_pair(l, x))
}

/// Same as [`riccati_bessel`] without the domain check; `x` must be positive.
pub fn riccati_bessel_pair(l: u32, x: f64) -> RiccatiBessel {
    let (s, c) = x.sin_cos();
    if l == 0 {
        return RiccatiBessel { j: s, n: c, dj: c, dn: -s };
    }
    let (n_prev, n_cur) = upward(l, x, c, c / x + s);
    let (j_prev, j_cur) = if x > l as f64 {
        upward(l, x, s, s / x - c)
    } else {
        miller(l, x, s, c)
    };
    let lx = l as f64 / x;
    RiccatiBessel {
        j: j_cur,
        n: n_cur,
        dj: j_prev - lx * j_cur,
        dn: n_prev - lx * n_cur,
    }
}

/// Returns `(z_{l-1}, z_l)` from `z_0`, `z_1` by `z_{n+1} = (2n+1)/x z_n − z_{n−1}`.
fn upward(l: u32, x: f64, z0: f64, z1: f64) -> (f64, f64) {
    let (mut a, mut b) = (z0, z1);
    for n in 1..l {
        let next = (2 * n + 1) as f64 / x * b - a;
        a = b;
        b = next;
    }
    (a, b)
}

fn miller(l: u32, x: f64, s: f64, c: f64) -> (f64, f64) {
    let start = l as usize + 30 + (x.sqrt() * 10.0) as usize;
    let (mut upper, mut cur) = (0.0f64, 1e-280f64);
    let (mut val_l, mut val_lm1) = (0.0, 0.0);
    let mut j1 = 0.0;
    for n in (1..=start).rev() {
        // cur = z_n, upper = z_{n+1}; step down to z_{n-1}
        let lower = (2 * n + 1) as f64 / x * cur - upper;
        if n as u32 == l {
            val_l = cur;
            val_lm1 = lower;
        }
        if n == 1 {
            j1 = cur;
        }
        upper = cur;
        cur = lower;
        if cur.abs() > 1e250 {
            upper *= 1e-250;
            cur *= 1e-250;
            val_l *= 1e-250;
            val_lm1 *= 1e-250;
            j1 *= 1e-250;
        }
    }
    let j0 = cur;
    let scale = if s.abs() >= 0.3 {
        s / j0
    } else {
        (s / x - c) / j1
    };
    (val_lm1 * scale, val_l * scale)
}

/// Log-derivatives `(î_L'/î_L, k̂_L'/k̂_L)` of the growing and decaying modified
/// Riccati–Bessel functions at `x > 0`, computed without the exponential factors.
pub fn modified_riccati_log_derivatives(l: u32, x: f64) -> (f64, f64) {
    (growing_log_derivative(l, x), decaying_log_derivative(l, x))
}

fn growing_log_derivative(l: u32, x: f64) -> f64 {
    if l == 0 {
        return 1.0 / x.tanh();
    }
    // r_n = î_n / î_{n−1} = 1 / ((2n+1)/x + r_{n+1})
    let top = l as usize + x as usize + 60;
    let mut r = 0.0;
    for n in (l as usize..=top).rev() {
        r = 1.0 / ((2 * n + 1) as f64 / x + r);
    }
    1.0 / r - l as f64 / x
}

fn decaying_log_derivative(l: u32, x: f64) -> f64 {
    if l == 0 {
        return -1.0;
    }
    // k̂_n = e^{−x} p_n, p_{n+1} = p_{n−1} + (2n+1)/x p_n
    let (mut p0, mut p1) = (1.0, 1.0 + 1.0 / x);
    for n in 1..l {
        let p2 = p0 + (2 * n + 1) as f64 / x * p1;
        p0 = p1;
        p1 = p2;
        if p1 > 1e250 {
            p0 *= 1e-250;
            p1 *= 1e-250;
        }
    }
    -p0 / p1 - l as f64 / x
}
