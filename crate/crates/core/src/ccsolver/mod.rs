//! Coupled-channel solver: channel bases in the total-angular-momentum
//! representation, log-derivative propagation, asymptotic matching and
//! S-matrix persistence.

mod basis;
mod config;
mod io;
mod matching;
mod propagate;
mod smatrix;
mod solve;

pub use basis::{build_basis, Channel, ChannelBasis};
pub use config::CollisionConfig;
pub use io::{read_smatrix, read_smatrix_file, write_smatrix, write_smatrix_file, SMatrixSet, SMATRIX_SCHEMA};
pub use matching::{k_matrix_from_log_derivative, match_block, s_from_k};
pub use propagate::{johnson_propagate, propagate, radial_plan, FarTransfer, Propagated, RadialPlan};
pub use smatrix::{BlockDiagnostics, SMatrixBlock, S_TOLERANCE};
pub use solve::{
    cross_section, cross_section_by_partial_wave, solve_all, solve_block, EnergySolution, Transition,
};

use thiserror::Error;

use crate::potential::PotentialError;

#[derive(Debug, Error)]
pub enum CcError {
    #[error("invalid collision configuration: {0}")]
    InvalidConfig(String),
    #[error("no channels for J = {total_j}, parity {parity:+}")]
    EmptyBasis { total_j: u32, parity: i32 },
    #[error("propagation failed at R = {r} bohr: {message}")]
    Propagation { r: f64, message: String },
    #[error(
        "matching failed for J = {total_j}, parity {parity:+}: {what} defect {defect:e}; \
         increase R_max or steps_per_wavelength"
    )]
    Matching { total_j: u32, parity: i32, what: &'static str, defect: f64 },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("{} block(s) failed: {}", .0.len(), summarize(.0))]
    Blocks(Vec<(u32, i32, CcError)>),
    #[error("S-matrix file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn summarize(failures: &[(u32, i32, CcError)]) -> String {
    failures
        .iter()
        .map(|(j, p, e)| format!("[J = {j}, parity {p:+}] {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}
