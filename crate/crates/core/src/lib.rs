//! Coupled-channel scattering of a rigid rotor by a structureless partner,
//! and the stereodynamical observables derived from the resulting S-matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`angular`]: Clebsch–Gordan, 3j/6j symbols, rotation matrices,
//!   Legendre polynomials and Riccati–Bessel functions.
//! * [`potential`]: anisotropic interaction models `V(R, θ) = Σ_λ v_λ(R) P_λ(cos θ)`,
//!   the potential file format and the surrogate calibration search.
//! * [`ccsolver`]: channel bases, log-derivative propagation, asymptotic
//!   matching and S-matrix persistence.
//! * [`stereo`]: helicity amplitudes, polarization-dependent cross sections,
//!   polarization moments, prepared-state cross sections and portraits.
//! * [`scan`]: energy scans, threshold-law fits and resonance analysis.
//! * [`cli`]: run configuration and the command drivers used by the binary.
//!
//! Units: energies in kelvin, lengths in bohr, angles in radians unless a
//! name says otherwise. Cross sections are computed in bohr² and reported
//! in Å² at file boundaries.

pub mod angular;
pub mod ccsolver;
pub mod cli;
pub mod potential;
pub mod scan;
pub mod stereo;
pub mod units;

mod ini;
mod linalg;

pub use ccsolver::{ChannelBasis, CollisionConfig, SMatrixBlock};
pub use potential::PotentialModel;
