//! A small surrogate search: which well depth and anisotropy put a single
//! Ω = 0-excluded L = 2 resonance below 1 K while keeping the threshold law.

use stereodyn::potential::{surrogate_calibration, ResonanceTarget, SearchGrid};
use stereodyn::CollisionConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = CollisionConfig { steps_per_wavelength: 80, ..CollisionConfig::default() };
    let grid = SearchGrid { epsilons: vec![38.0, 38.5, 39.0], v2_amplitudes: vec![-9.0e4], ..SearchGrid::default() };
    match surrogate_calibration(&cfg, &grid, &ResonanceTarget::default()) {
        Ok(report) => print!("{}", report.to_text()),
        Err(e) => println!("no candidate: {e}"),
    }
    Ok(())
}
