//! Helicity amplitudes and the stereodynamical observables built on them:
//! polarization-dependent differential cross sections, polarization
//! moments, prepared-state cross sections and internuclear-axis portraits.
//!
//! Frame: `z` along the initial relative velocity `k`, scattering in the
//! `x–z` plane. Cross sections are in bohr².

mod amplitudes;
mod csv;
mod grid;
mod helicity;
mod moments;
mod portrait;
mod preparation;

pub use amplitudes::{amplitudes, AmplitudeSet};
pub use csv::{
    read_moments_csv, write_dcs_csv, write_moments_csv, write_portrait_csv, DcsRow, MomentRow, DCS_SCHEMA,
    MOMENTS_SCHEMA, PORTRAIT_SCHEMA,
};
pub use grid::ThetaGrid;
pub use helicity::{helicity_transform, helicity_transform_restricted, HelicityMatrices};
pub use moments::{
    direct_moments, moment_index, pddcs, per_l_moments, polarization_moments, DirectMoments, MomentSet,
    PolarizationMoments,
};
pub use portrait::{portrait, Portrait};
pub use preparation::{prep_dcs, prep_ics, prep_ics_numeric, PrepDcs, Preparation, MAGIC_ANGLE_DEG};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StereoError {
    #[error("J = {total_j} is missing its parity {parity:+} block; both parities are needed for helicity amplitudes")]
    IncompleteBlocks { total_j: u32, parity: i32 },
    #[error("rotor level j = {0} is closed or absent")]
    ClosedLevel(u32),
    #[error("no S-matrix blocks at a single collision energy")]
    NoBlocks,
    #[error("wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),
    #[error("moment rank k = {k} exceeds 2j = {}", 2 * .j)]
    RankTooHigh { k: u32, j: u32 },
    #[error("cross section vanishes; moments are undefined")]
    ZeroCrossSection,
    #[error("{what} must lie in {range}, got {value}°")]
    Angle { what: &'static str, range: &'static str, value: f64 },
    #[error("negative density {value:e} exceeds the grid tolerance {tolerance:e}")]
    NegativeDensity { value: f64, tolerance: f64 },
    #[error("grid needs at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
