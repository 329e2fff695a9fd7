//! Allocation-free dense helpers for the propagator's inner loop.

/// Solves `A X = B` in place: on success `b` holds `X` and `a` is destroyed.
/// Both are row-major; `a` is `n × n`, `b` is `n × m`. Gaussian elimination
/// with partial pivoting. Returns `false` on a zero pivot.
pub(crate) fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize, m: usize) -> bool {
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return false;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            for k in 0..m {
                b.swap(col * m + k, piv * m + k);
            }
        }
        let inv = 1.0 / a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] * inv;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            for k in 0..m {
                b[row * m + k] -= f * b[col * m + k];
            }
        }
    }
    for col in (0..n).rev() {
        let inv = 1.0 / a[col * n + col];
        for k in 0..m {
            let mut s = b[col * m + k];
            for j in col + 1..n {
                s -= a[col * n + j] * b[j * m + k];
            }
            b[col * m + k] = s * inv;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let a0 = a.clone();
        let mut b = vec![1.0, 0.0, 0.0, 1.0, 2.0, 5.0];
        let b0 = b.clone();
        assert!(solve_in_place(&mut a, &mut b, 3, 2));
        for r in 0..3 {
            for c in 0..2 {
                let s: f64 = (0..3).map(|k| a0[r * 3 + k] * b[k * 2 + c]).sum();
                assert!((s - b0[r * 2 + c]).abs() < 1e-12);
            }
        }
        let mut singular = vec![1.0, 2.0, 2.0, 4.0];
        let mut rhs = vec![1.0, 1.0];
        assert!(!solve_in_place(&mut singular, &mut rhs, 2, 1));
    }
}
