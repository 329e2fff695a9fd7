//! Physical constants and unit conversions. Everything internal is kelvin and bohr.

/// Electron masses per unified atomic mass unit.
pub const AMU_IN_ELECTRON_MASSES: f64 = 1822.888_486_209;

/// One hartree expressed in kelvin.
pub const HARTREE_IN_KELVIN: f64 = 315_775.024_804;

/// One bohr expressed in ångström.
pub const BOHR_IN_ANGSTROM: f64 = 0.529_177_210_903;

/// bohr² → Å² conversion factor for cross sections.
pub const BOHR2_TO_ANGSTROM2: f64 = BOHR_IN_ANGSTROM * BOHR_IN_ANGSTROM;

/// ħ²/2μ in K·bohr² for a reduced mass given in amu.
pub fn hbar2_over_2mu(mu_amu: f64) -> f64 {
    HARTREE_IN_KELVIN / (2.0 * mu_amu * AMU_IN_ELECTRON_MASSES)
}

/// Wavenumber (bohr⁻¹) of a channel with kinetic energy `e_kin` (K).
pub fn wavenumber(mu_amu: f64, e_kin: f64) -> f64 {
    (e_kin / hbar2_over_2mu(mu_amu)).sqrt()
}
