//! Energy scans of cross sections and stereodynamical observables, with
//! threshold-law fits and resonance characterization.

mod mechanism;
mod resonance;
mod table;
mod threshold;

pub use mechanism::{mechanism_summary, MechanismDigest};
pub use resonance::{
    find_resonances, find_resonances_in, write_resonance_report, BreitWignerFit, ResonanceReport, RESONANCE_SCHEMA,
};
pub use table::{
    energy_scan, energy_scan_cancellable, log_grid, refine_grid, scan_with_refinement, write_scan_csv, RowData,
    ScanRow, ScanSettings, ScanTable, TransitionRow, SCAN_SCHEMA,
};
pub use threshold::wigner_slope;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("energy grid is empty")]
    EmptyGrid,
    #[error("energies must be positive and strictly increasing (index {index})")]
    NotIncreasing { index: usize },
    #[error("fit window [{lo}, {hi}] K holds {got} usable points, need at least 3")]
    WindowTooSmall { lo: f64, hi: f64, got: usize },
    #[error("transition {j} -> {jp} is not part of the scan")]
    UnknownTransition { j: u32, jp: u32 },
    #[error("no transitions requested")]
    NoTransitions,
}
