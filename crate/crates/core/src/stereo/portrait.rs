use std::f64::consts::PI;

use super::{PolarizationMoments, StereoError, ThetaGrid};
use crate::angular::{cg, modified_spherical_harmonic};

/// Internuclear-axis density on a `θ_r × φ_r` grid, `z ∥ k`, `x–z` the scattering plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub theta: ThetaGrid,
    pub phi: Vec<f64>,
    /// Row-major `[θ][φ]`.
    pub density: Vec<f64>,
    pub clamped: usize,
}

impl Portrait {
    pub fn at(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.density[i_theta * self.phi.len() + i_phi]
    }

    /// Solid-angle weight of grid point `(i_theta, i_phi)`.
    pub fn weight(&self, i_theta: usize) -> f64 {
        self.theta.weights[i_theta] / self.phi.len() as f64
    }

    /// `∫ P dΩ`.
    pub fn normalization(&self) -> f64 {
        let nphi = self.phi.len();
        (0..self.theta.len())
            .map(|i| self.weight(i) * self.density[i * nphi..(i + 1) * nphi].iter().sum::<f64>())
            .sum()
    }
}

/// `P(θ_r, φ_r) = (1/4π) Σ_{k even} Σ_q (2k+1) ⟨j0 k0|j0⟩ [s^(k)_q]* C_{kq}(θ_r, φ_r)`.
///
/// The factor `⟨j0 k0|j0⟩` maps the rotational polarization onto the
/// molecular axis; without it an `m = 0` state would not peak at the poles.
pub fn portrait(moments: &PolarizationMoments, n_theta: usize, n_phi: usize) -> Result<Portrait, StereoError> {
    if n_phi < 1 {
        return Err(StereoError::GridTooSmall { min: 1, got: n_phi });
    }
    let theta = ThetaGrid::gauss_legendre(n_theta)?;
    let phi: Vec<f64> = (0..n_phi).map(|m| 2.0 * PI * m as f64 / n_phi as f64).collect();
    let j = moments.j;
    if (1..=2 * j).step_by(2).any(|k| (-(k as i32)..=k as i32).any(|q| moments.get(k, q).map_or(false, |v| v.norm() > 0.0))) {
        log::debug!("odd-rank moments ignored in the axis portrait");
    }
    let mut density = vec![0.0; theta.len() * n_phi];
    for k in (0..=2 * j).step_by(2) {
        let axis = cg(j, 0, k, 0, j, 0) * (2 * k + 1) as f64 / (4.0 * PI);
        for q in -(k as i32)..=k as i32 {
            let s = moments.get(k, q)?.conj() * axis;
            if s.norm() == 0.0 {
                continue;
            }
            for (i, &t) in theta.theta.iter().enumerate() {
                for (m, &p) in phi.iter().enumerate() {
                    density[i * n_phi + m] += (s * modified_spherical_harmonic(k, q, t, p)).re;
                }
            }
        }
    }
    let max = density.iter().cloned().fold(0.0, f64::max);
    let tolerance = 1e-10 * max;
    let mut clamped = 0;
    for v in density.iter_mut() {
        if *v < 0.0 {
            if -*v > tolerance {
                return Err(StereoError::NegativeDensity { value: *v, tolerance });
            }
            *v = 0.0;
            clamped += 1;
        }
    }
    Ok(Portrait { theta, phi, density, clamped })
}
