use std::f64::consts::PI;

use num_complex::Complex64;

use super::{amplitudes, helicity_transform_restricted, AmplitudeSet, HelicityMatrices, StereoError, ThetaGrid};
use crate::angular::cg;
use crate::ccsolver::{SMatrixBlock, Transition};

/// Flat position of `(k, q)` in moment arrays: `k² + k + q`.
pub fn moment_index(k: u32, q: i32) -> usize {
    ((k * k + k) as i64 + q as i64) as usize
}

fn n_moments(j: u32) -> usize {
    let kmax = 2 * j + 1;
    (kmax * kmax) as usize
}

/// Polarization-dependent DCSs `S^(k)_q(θ)` for `k ≤ 2j` (bohr²/sr).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub transition: Transition,
    pub e_col: f64,
    pub grid: ThetaGrid,
    values: Vec<Vec<Complex64>>,
}

impl MomentSet {
    pub fn j(&self) -> u32 {
        self.transition.j
    }

    pub fn k_max(&self) -> u32 {
        2 * self.transition.j
    }

    /// `S^(k)_q` over the grid.
    pub fn component(&self, k: u32, q: i32) -> Result<&[Complex64], StereoError> {
        if k > self.k_max() {
            return Err(StereoError::RankTooHigh { k, j: self.j() });
        }
        if q.unsigned_abs() > k {
            return Err(StereoError::RankTooHigh { k: q.unsigned_abs(), j: self.j() });
        }
        Ok(&self.values[moment_index(k, q)])
    }

    /// `S^(0)_0`, the unpolarized DCS.
    pub fn dcs(&self) -> Vec<f64> {
        self.values[0].iter().map(|c| c.re).collect()
    }

    /// Integral cross section `∫ S^(0)_0 dω` (bohr²).
    pub fn sigma(&self) -> f64 {
        self.grid.integrate(&self.dcs())
    }

    /// Largest `|S^(k)_{−q} − (−1)^q [S^(k)_q]*|` over all components and angles.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..=self.k_max() {
            for q in 0..=k as i32 {
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                let plus = &self.values[moment_index(k, q)];
                let minus = &self.values[moment_index(k, -q)];
                for (a, b) in plus.iter().zip(minus) {
                    worst = worst.max((b - a.conj() * sign).norm());
                }
            }
        }
        worst
    }
}

/// `S^(k)_q(θ) = (1/(2j+1)) Σ f_{Ω'Ω1} f*_{Ω'Ω2} ⟨jΩ1 kq|jΩ2⟩` for every `k ≤ 2j`.
pub fn pddcs(amps: &AmplitudeSet) -> MomentSet {
    let (j, jp) = (amps.transition.j, amps.transition.jp);
    let n = amps.grid.len();
    let norm = 1.0 / (2 * j + 1) as f64;
    let mut values = vec![vec![Complex64::new(0.0, 0.0); n]; n_moments(j)];
    for k in 0..=2 * j {
        for q in -(k as i32)..=k as i32 {
            let out = &mut values[moment_index(k, q)];
            for o1 in -(j as i32)..=j as i32 {
                let o2 = o1 + q;
                if o2.unsigned_abs() > j {
                    continue;
                }
                let c = cg(j, o1, k, q, j, o2);
                if c == 0.0 {
                    continue;
                }
                for op in -(jp as i32)..=jp as i32 {
                    let (f1, f2) = (amps.get(op, o1), amps.get(op, o2));
                    for i in 0..n {
                        out[i] += f1[i] * f2[i].conj() * (c * norm);
                    }
                }
            }
        }
    }
    MomentSet { transition: amps.transition, e_col: amps.e_col, grid: amps.grid.clone(), values }
}

/// Integral polarization moments `s^(k)_q`, renormalized so that `s^(0)_0 = 1`.
///
/// Integration runs over the scattering angle in the scattering frame, so
/// components with `q ≠ 0` are retained.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationMoments {
    pub j: u32,
    pub e_col: f64,
    /// Normalization `σ` (bohr²); 1 for intrinsic moments.
    pub sigma: f64,
    values: Vec<Complex64>,
}

impl PolarizationMoments {
    /// Builds moments from values laid out by [`moment_index`].
    pub fn from_values(j: u32, e_col: f64, sigma: f64, values: Vec<Complex64>) -> Option<Self> {
        (values.len() == n_moments(j)).then_some(Self { j, e_col, sigma, values })
    }

    /// Intrinsic moments of the pure state `|j m⟩`: `s^(k)_0 = ⟨j m k 0|j m⟩`.
    pub fn pure_state(j: u32, m: i32) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); n_moments(j)];
        for k in 0..=2 * j {
            values[moment_index(k, 0)] = Complex64::new(cg(j, m, k, 0, j, m), 0.0);
        }
        Self { j, e_col: 0.0, sigma: 1.0, values }
    }

    /// `q = 0` moments from the direct S-matrix path; other components are zero.
    pub fn from_direct(j: u32, e_col: f64, direct: &DirectMoments) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); n_moments(j)];
        for (k, &v) in direct.s0.iter().enumerate() {
            values[moment_index(k as u32, 0)] = Complex64::new(v, 0.0);
        }
        Self { j, e_col, sigma: direct.sigma, values }
    }

    /// Uniform `m` distribution.
    pub fn isotropic(j: u32) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); n_moments(j)];
        values[0] = Complex64::new(1.0, 0.0);
        Self { j, e_col: 0.0, sigma: 1.0, values }
    }

    pub fn get(&self, k: u32, q: i32) -> Result<Complex64, StereoError> {
        if k > 2 * self.j || q.unsigned_abs() > k {
            return Err(StereoError::RankTooHigh { k, j: self.j });
        }
        Ok(self.values[moment_index(k, q)])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// `s^(k)_q = ∫ S^(k)_q dω / ∫ S^(0)_0 dω`.
pub fn polarization_moments(mset: &MomentSet) -> Result<PolarizationMoments, StereoError> {
    let sigma = mset.sigma();
    if !(sigma > 0.0) {
        return Err(StereoError::ZeroCrossSection);
    }
    let w = &mset.grid.weights;
    let values = mset
        .values
        .iter()
        .map(|v| v.iter().zip(w).map(|(c, &wi)| c * wi).sum::<Complex64>() / sigma)
        .collect();
    Ok(PolarizationMoments { j: mset.j(), e_col: mset.e_col, sigma, values })
}

/// `q = 0` integral moments evaluated straight from the helicity S-matrix,
/// without amplitudes or quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectMoments {
    /// `σ` (bohr²).
    pub sigma: f64,
    /// `s^(k)_0` for `k = 0..=2j`.
    pub s0: Vec<f64>,
}

/// `s^(k)_0 = π/((2j+1)k²σ) Σ_J (2J+1) Σ_{ΩΩ'} ⟨jΩ k0|jΩ⟩ |T^J_{Ω'Ω}|²`.
pub fn direct_moments(h: &HelicityMatrices) -> Result<DirectMoments, StereoError> {
    if !(h.k_in > 0.0) {
        return Err(StereoError::NonPositiveWavenumber(h.k_in));
    }
    let j = h.transition.j;
    let pref = PI / ((2 * j + 1) as f64 * h.k_in * h.k_in);
    let mut raw = vec![0.0; 2 * j as usize + 1];
    for (total_j, t) in &h.t {
        let weight = (2 * total_j + 1) as f64;
        for (c, omega) in (-(j as i32)..=j as i32).enumerate() {
            let col: f64 = t.column(c).iter().map(|z| z.norm_sqr()).sum();
            if col == 0.0 {
                continue;
            }
            for (k, acc) in raw.iter_mut().enumerate() {
                *acc += pref * weight * col * cg(j, omega, k as u32, 0, j, omega);
            }
        }
    }
    let sigma = raw[0];
    if !(sigma > 0.0) {
        return Err(StereoError::ZeroCrossSection);
    }
    Ok(DirectMoments { sigma, s0: raw.iter().map(|v| v / sigma).collect() })
}

/// Moments of the amplitude built from TAM elements with entrance partial wave `l` only.
pub fn per_l_moments(
    blocks: &[SMatrixBlock],
    t: Transition,
    l: u32,
    grid: &ThetaGrid,
) -> Result<PolarizationMoments, StereoError> {
    let h = helicity_transform_restricted(blocks, t, l)?;
    let amps = amplitudes(&h, grid)?;
    polarization_moments(&pddcs(&amps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_omega(omega: i32) -> AmplitudeSet {
        let grid = ThetaGrid::gauss_legendre(6).unwrap();
        let t = Transition::new(2, 1);
        let mut f = vec![Complex64::new(0.0, 0.0); 3 * 5 * grid.len()];
        let c = (omega + 2) as usize;
        for r in 0..3 {
            for i in 0..grid.len() {
                f[(r * 5 + c) * grid.len() + i] = Complex64::new(0.3 + i as f64, -0.1 * r as f64);
            }
        }
        AmplitudeSet::from_values(t, 1.0, 0.5, grid, f).unwrap()
    }

    #[test]
    fn single_helicity_moments_are_clebsch_gordan() {
        for omega in -2..=2 {
            let m = pddcs(&single_omega(omega));
            let dcs = m.dcs();
            for k in 0..=4 {
                let ratio = m.component(k, 0).unwrap()[2].re / dcs[2];
                assert!((ratio - cg(2, omega, k, 0, 2, omega)).abs() < 1e-14);
            }
            let p = polarization_moments(&m).unwrap();
            assert!((p.get(0, 0).unwrap() - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn rank_above_twice_j_is_rejected() {
        let m = pddcs(&single_omega(0));
        assert_eq!(m.component(5, 0).unwrap_err(), StereoError::RankTooHigh { k: 5, j: 2 });
    }

    #[test]
    fn vanishing_cross_section_has_no_moments() {
        let grid = ThetaGrid::gauss_legendre(4).unwrap();
        let f = vec![Complex64::new(0.0, 0.0); 15 * grid.len()];
        let a = AmplitudeSet::from_values(Transition::new(2, 1), 1.0, 0.5, grid, f).unwrap();
        assert_eq!(polarization_moments(&pddcs(&a)).unwrap_err(), StereoError::ZeroCrossSection);
    }

    #[test]
    fn moment_index_is_dense() {
        let idx: Vec<usize> = (0..=4u32).flat_map(|k| (-(k as i32)..=k as i32).map(move |q| moment_index(k, q))).collect();
        assert_eq!(idx, (0..25).collect::<Vec<_>>());
    }
}
