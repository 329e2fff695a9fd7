use std::f64::consts::PI;

use super::StereoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    GaussLegendre,
    Trapezoid,
}

/// Scattering angles with weights for `∫ dω = 2π ∫ sin θ dθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaGrid {
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
    rule: Rule,
}

impl ThetaGrid {
    /// Gauss–Legendre nodes in `cos θ`, ascending in θ.
    pub fn gauss_legendre(n: usize) -> Result<Self, StereoError> {
        if n < 2 {
            return Err(StereoError::GridTooSmall { min: 2, got: n });
        }
        let (x, w) = gauss_legendre_nodes(n);
        // nodes come out descending in cos θ, so θ ascends
        let theta = x.iter().map(|c| c.acos()).collect();
        let weights = w.iter().map(|w| 2.0 * PI * w).collect();
        Ok(Self { theta, weights, rule: Rule::GaussLegendre })
    }

    /// `n` equally spaced angles including 0 and π, trapezoid weights.
    pub fn uniform(n: usize) -> Result<Self, StereoError> {
        if n < 3 {
            return Err(StereoError::GridTooSmall { min: 3, got: n });
        }
        let h = PI / (n - 1) as f64;
        let theta: Vec<f64> = (0..n).map(|i| if i == n - 1 { PI } else { i as f64 * h }).collect();
        let weights = theta
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let end = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                2.0 * PI * h * end * t.sin()
            })
            .collect();
        Ok(Self { theta, weights, rule: Rule::Trapezoid })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn is_gauss_legendre(&self) -> bool {
        self.rule == Rule::GaussLegendre
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn degrees(&self) -> impl Iterator<Item = f64> + '_ {
        self.theta.iter().map(|t| t.to_degrees())
    }
}

/// Nodes (descending) and weights on `[−1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let g = ThetaGrid::gauss_legendre(12).unwrap();
        // ∫ cos^{2m} θ dω = 4π/(2m+1)
        for m in 0..12 {
            let v: Vec<f64> = g.theta.iter().map(|t| t.cos().powi(2 * m)).collect();
            let exact = 4.0 * PI / (2 * m + 1) as f64;
            assert!((g.integrate(&v) - exact).abs() < 1e-13, "m = {m}");
        }
        assert!(g.theta.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn trapezoid_converges_at_second_order() {
        let err = |n| {
            let g = ThetaGrid::uniform(n).unwrap();
            let v: Vec<f64> = g.theta.iter().map(|t| t.cos().powi(2)).collect();
            (g.integrate(&v) - 4.0 * PI / 3.0).abs()
        };
        let order = (err(181) / err(361)).log2();
        assert!((order - 2.0).abs() < 0.05, "{order}");
        assert_eq!(ThetaGrid::uniform(721).unwrap().theta[720], PI);
    }
}
