use num_complex::Complex64;

use super::{HelicityMatrices, StereoError, ThetaGrid};
use crate::angular::reduced_rotation_d;
use crate::ccsolver::Transition;

/// Helicity amplitudes `f_{Ω'Ω}(θ)`, with `dσ/dω = |f|²` per helicity pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSet {
    pub transition: Transition,
    pub e_col: f64,
    /// Entrance wavenumber (bohr⁻¹).
    pub k: f64,
    pub grid: ThetaGrid,
    f: Vec<Complex64>,
}

impl AmplitudeSet {
    fn offset(&self, omega_p: i32, omega: i32) -> usize {
        let nj = 2 * self.transition.j as usize + 1;
        let r = (omega_p + self.transition.jp as i32) as usize;
        let c = (omega + self.transition.j as i32) as usize;
        (r * nj + c) * self.grid.len()
    }

    /// `f_{Ω'Ω}` over the grid.
    pub fn get(&self, omega_p: i32, omega: i32) -> &[Complex64] {
        let o = self.offset(omega_p, omega);
        &self.f[o..o + self.grid.len()]
    }

    /// Builds a set from explicit values, laid out as `[(Ω'+j')(2j+1) + Ω+j][θ]`.
    pub fn from_values(
        transition: Transition,
        e_col: f64,
        k: f64,
        grid: ThetaGrid,
        f: Vec<Complex64>,
    ) -> Option<Self> {
        let n = (2 * transition.j as usize + 1) * (2 * transition.jp as usize + 1) * grid.len();
        (f.len() == n).then_some(Self { transition, e_col, k, grid, f })
    }

    /// Unpolarized DCS `(1/(2j+1)) Σ |f_{Ω'Ω}|²` (bohr²/sr).
    pub fn dcs(&self) -> Vec<f64> {
        let (j, jp) = (self.transition.j as i32, self.transition.jp as i32);
        let mut out = vec![0.0; self.grid.len()];
        for op in -jp..=jp {
            for o in -j..=j {
                for (acc, f) in out.iter_mut().zip(self.get(op, o)) {
                    *acc += f.norm_sqr();
                }
            }
        }
        let norm = 1.0 / (2 * j + 1) as f64;
        out.iter_mut().for_each(|v| *v *= norm);
        out
    }

    /// `(1/(2j+1)) Σ ∫ |f|² dω`.
    pub fn integral_cross_section(&self) -> f64 {
        self.grid.integrate(&self.dcs())
    }
}

/// `f_{Ω'Ω}(θ) = (1/2ik) Σ_J (2J+1) d^J_{ΩΩ'}(θ) T^J_{Ω'Ω}`.
///
/// The `d^J_{ΩΩ'}` ordering puts `k'` at azimuth 0, in the `+x` half of the
/// scattering plane; `d^J_{Ω'Ω}` would describe scattering towards `−x`.
pub fn amplitudes(h: &HelicityMatrices, grid: &ThetaGrid) -> Result<AmplitudeSet, StereoError> {
    if !(h.k_in > 0.0) {
        return Err(StereoError::NonPositiveWavenumber(h.k_in));
    }
    let (j, jp) = (h.transition.j as i32, h.transition.jp as i32);
    let n = grid.len();
    let nj = (2 * j + 1) as usize;
    let mut f = vec![Complex64::new(0.0, 0.0); nj * (2 * jp + 1) as usize * n];
    let pref = Complex64::new(0.0, -1.0 / (2.0 * h.k_in)); // 1/(2ik)
    for (total_j, t) in &h.t {
        let weight = (2 * total_j + 1) as f64;
        for (r, op) in (-jp..=jp).enumerate() {
            for (c, o) in (-j..=j).enumerate() {
                let tv = t[(r, c)];
                if tv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let base = (r * nj + c) * n;
                let coeff = pref * weight * tv;
                for (i, &theta) in grid.theta.iter().enumerate() {
                    f[base + i] += coeff * reduced_rotation_d(*total_j, o, op, theta);
                }
            }
        }
    }
    Ok(AmplitudeSet { transition: h.transition, e_col: h.e_col, k: h.k_in, grid: grid.clone(), f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn helicity(t: Vec<(u32, DMatrix<Complex64>)>, k: f64) -> HelicityMatrices {
        HelicityMatrices { transition: Transition::new(2, 2), e_col: 1.0, k_in: k, k_out: k, t }
    }

    #[test]
    fn no_transition_no_scattering() {
        let h = helicity((0..4).map(|j| (j, DMatrix::zeros(5, 5))).collect(), 0.3);
        let a = amplitudes(&h, &ThetaGrid::gauss_legendre(8).unwrap()).unwrap();
        assert!(a.dcs().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_non_positive_wavenumber() {
        let h = helicity(vec![(0, DMatrix::zeros(5, 5))], 0.0);
        let err = amplitudes(&h, &ThetaGrid::gauss_legendre(8).unwrap()).unwrap_err();
        assert_eq!(err, StereoError::NonPositiveWavenumber(0.0));
    }

    #[test]
    fn single_wave_integrates_to_partial_cross_section() {
        // one J = 3 element: ∫|f|² dω = π (2J+1) |T|² / k², then averaged over 2j+1 helicities
        let mut t = DMatrix::zeros(5, 5);
        t[(3, 3)] = Complex64::new(0.4, -0.2);
        let k = 0.7;
        let h = helicity(vec![(3, t)], k);
        let a = amplitudes(&h, &ThetaGrid::gauss_legendre(16).unwrap()).unwrap();
        let expected = std::f64::consts::PI * 7.0 * 0.2 / (k * k) / 5.0;
        assert!((a.integral_cross_section() - expected).abs() < 1e-12 * expected);
    }
}
