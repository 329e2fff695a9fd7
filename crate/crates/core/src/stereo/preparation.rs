use std::f64::consts::PI;

use super::{MomentSet, PolarizationMoments, StereoError};
use crate::angular::{cg, legendre_p, modified_spherical_harmonic};

/// Polarization angle that zeroes `P_2(cos β)`, in degrees.
pub const MAGIC_ANGLE_DEG: f64 = 54.735_610_317_245_35;

/// Reactant preparation: a directed `m = 0` state (or an isotropic ensemble)
/// whose polarization vector sits at polar angle `β` from `k` and azimuth `α`
/// from the scattering plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Preparation {
    pub label: String,
    pub beta_deg: f64,
    pub alpha_deg: f64,
    /// Extrinsic moments `A^(k)_0`, indexed by `k`; odd entries are zero.
    pub a: Vec<f64>,
}

impl Preparation {
    /// `m = 0` along the polarization vector: `A^(k)_0 = ⟨j0 k0|j0⟩`.
    pub fn directed(j: u32, beta_deg: f64, alpha_deg: f64) -> Result<Self, StereoError> {
        check_angles(beta_deg, alpha_deg)?;
        let a = (0..=2 * j).map(|k| if k % 2 == 0 { cg(j, 0, k, 0, j, 0) } else { 0.0 }).collect();
        Ok(Self { label: format!("beta{beta_deg}"), beta_deg, alpha_deg, a })
    }

    /// `A^(k)_0 = δ_{k0}`.
    pub fn unpolarized(j: u32) -> Self {
        let mut a = vec![0.0; 2 * j as usize + 1];
        a[0] = 1.0;
        Self { label: "unpolarized".into(), beta_deg: 0.0, alpha_deg: 0.0, a }
    }

    pub fn is_unpolarized(&self) -> bool {
        self.a.iter().skip(1).all(|&v| v == 0.0)
    }

    fn rank(&self) -> u32 {
        self.a.len() as u32 - 1
    }
}

fn check_angles(beta: f64, alpha: f64) -> Result<(), StereoError> {
    if !(0.0..=180.0).contains(&beta) {
        return Err(StereoError::Angle { what: "beta", range: "[0, 180]", value: beta });
    }
    if !(0.0..360.0).contains(&alpha) {
        return Err(StereoError::Angle { what: "alpha", range: "[0, 360)", value: alpha });
    }
    Ok(())
}

/// Preparation DCS over the moment grid. Values within `1e-10·max` below
/// zero are clamped to zero and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepDcs {
    pub values: Vec<f64>,
    pub clamped: usize,
}

fn raw_prep_dcs(mset: &MomentSet, a: &[f64], beta: f64, alpha: f64) -> Vec<f64> {
    let mut out = vec![0.0; mset.grid.len()];
    let k_max = mset.k_max().min(a.len() as u32 - 1);
    for k in (0..=k_max).step_by(2) {
        let ak = a[k as usize];
        if ak == 0.0 {
            continue;
        }
        for q in -(k as i32)..=k as i32 {
            let c = modified_spherical_harmonic(k, q, beta, alpha) * ((2 * k + 1) as f64 * ak);
            let s = mset.component(k, q).expect("rank checked");
            for (o, v) in out.iter_mut().zip(s) {
                *o += (v.conj() * c).re;
            }
        }
    }
    out
}

fn clamp(values: Vec<f64>) -> Result<PrepDcs, StereoError> {
    let max = values.iter().cloned().fold(0.0, f64::max);
    let tolerance = 1e-10 * max;
    let mut clamped = 0;
    let mut values = values;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if -*v > tolerance {
                return Err(StereoError::NegativeDensity { value: *v, tolerance });
            }
            *v = 0.0;
            clamped += 1;
        }
    }
    Ok(PrepDcs { values, clamped })
}

/// `dσ/dω(θ; β, α) = Σ_{k even} Σ_q (2k+1) [S^(k)_q(θ)]* A^(k)_0 C_{kq}(β, α)`.
pub fn prep_dcs(mset: &MomentSet, prep: &Preparation) -> Result<PrepDcs, StereoError> {
    check_angles(prep.beta_deg, prep.alpha_deg)?;
    if prep.rank() > mset.k_max() && prep.a.iter().skip(mset.k_max() as usize + 1).any(|&v| v != 0.0) {
        return Err(StereoError::RankTooHigh { k: prep.rank(), j: mset.j() });
    }
    clamp(raw_prep_dcs(mset, &prep.a, prep.beta_deg.to_radians(), prep.alpha_deg.to_radians()))
}

/// `σ(β) = σ Σ_{k even} (2k+1) s^(k)_0 A^(k)_0 P_k(cos β)` (bohr²).
pub fn prep_ics(moments: &PolarizationMoments, prep: &Preparation) -> Result<f64, StereoError> {
    check_angles(prep.beta_deg, prep.alpha_deg)?;
    let x = prep.beta_deg.to_radians().cos();
    let mut total = 0.0;
    for k in (0..=(2 * moments.j).min(prep.rank())).step_by(2) {
        let ak = prep.a[k as usize];
        if ak == 0.0 {
            continue;
        }
        let s = moments.get(k, 0)?.re;
        total += (2 * k + 1) as f64 * s * ak * legendre_p(k, x).expect("|cos β| ≤ 1");
    }
    Ok(moments.sigma * total)
}

/// Preparation ICS by direct quadrature of [`prep_dcs`] over θ and the
/// scattering azimuth φ (`n_phi` uniform points, which rotate `α` to `α − φ`).
pub fn prep_ics_numeric(mset: &MomentSet, prep: &Preparation, n_phi: usize) -> Result<f64, StereoError> {
    check_angles(prep.beta_deg, prep.alpha_deg)?;
    if n_phi < 1 {
        return Err(StereoError::GridTooSmall { min: 1, got: n_phi });
    }
    let beta = prep.beta_deg.to_radians();
    let alpha = prep.alpha_deg.to_radians();
    let mut total = 0.0;
    for m in 0..n_phi {
        let phi = 2.0 * PI * m as f64 / n_phi as f64;
        let v = raw_prep_dcs(mset, &prep.a, beta, alpha - phi);
        // grid weights already carry the full 2π of the azimuth
        total += mset.grid.integrate(&v);
    }
    Ok(total / n_phi as f64)
}
