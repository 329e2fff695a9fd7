use super::CcError;
use crate::units;

/// Collision parameters for one rotor + partner system at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionConfig {
    /// Reduced mass (amu).
    pub mu: f64,
    /// Rotor constant (K); `E_j = B j(j+1)`.
    pub b_rotor: f64,
    /// Initial rotor level.
    pub j_initial: u32,
    /// Collision energy of the entrance channel (K).
    pub e_col: f64,
    /// Highest rotor level in the basis.
    pub j_max: u32,
    /// Closed channels are kept when `E_j − E_total < e_cut` (K).
    pub e_cut: f64,
    /// Start of propagation (bohr), inside the repulsive wall.
    pub r_min: f64,
    /// Minimum matching radius (bohr); extended automatically for long-range tails.
    pub r_max: f64,
    pub steps_per_wavelength: u32,
    /// Highest total angular momentum.
    pub j_total_max: u32,
}

impl Default for CollisionConfig {
    fn default() -> Self {
        Self {
            mu: 1.2,
            b_rotor: 64.3,
            j_initial: 2,
            e_col: 0.1,
            j_max: 3,
            e_cut: 500.0,
            r_min: 4.0,
            r_max: 200.0,
            steps_per_wavelength: 320,
            j_total_max: 10,
        }
    }
}

impl CollisionConfig {
    pub fn validate(&self) -> Result<(), CcError> {
        let bad = |m: String| Err(CcError::InvalidConfig(m));
        if !(self.e_col > 0.0) {
            return bad(format!("collision energy must be positive, got {}", self.e_col));
        }
        if !(self.mu > 0.0) {
            return bad(format!("reduced mass must be positive, got {}", self.mu));
        }
        if !(self.r_min > 0.0 && self.r_min < self.r_max) {
            return bad(format!("need 0 < R_min < R_max, got {} and {}", self.r_min, self.r_max));
        }
        if self.j_max < self.j_initial {
            return bad(format!("j_max = {} is below the initial level j = {}", self.j_max, self.j_initial));
        }
        if self.steps_per_wavelength < 2 {
            return bad("steps_per_wavelength must be at least 2".into());
        }
        if self.b_rotor < 0.0 || self.e_cut < 0.0 {
            return bad("rotor constant and closed-channel window must be non-negative".into());
        }
        Ok(())
    }

    pub fn with_energy(&self, e_col: f64) -> Self {
        Self { e_col, ..self.clone() }
    }

    pub fn rotor_energy(&self, j: u32) -> f64 {
        self.b_rotor * (j * (j + 1)) as f64
    }

    /// `E_col + E_{j_initial}`; channel openness is measured against this.
    pub fn total_energy(&self) -> f64 {
        self.e_col + self.rotor_energy(self.j_initial)
    }

    /// `ħ²/2μ` in K·bohr².
    pub fn hbar2_over_2mu(&self) -> f64 {
        units::hbar2_over_2mu(self.mu)
    }

    /// Wavenumber `k = √(2μ E_kin)/ħ` (bohr⁻¹).
    pub fn wavenumber(&self, e_kin: f64) -> f64 {
        (e_kin / self.hbar2_over_2mu()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let c = CollisionConfig::default();
        assert!(c.validate().is_ok());
        assert!(CollisionConfig { e_col: 0.0, ..c.clone() }.validate().is_err());
        assert!(CollisionConfig { r_min: 300.0, ..c.clone() }.validate().is_err());
        assert!(CollisionConfig { j_max: 1, ..c.clone() }.validate().is_err());
        assert!((c.total_energy() - (0.1 + 6.0 * 64.3)).abs() < 1e-12);
    }
}
