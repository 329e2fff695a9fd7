//! Helicity amplitudes, the polarization-dependent DCS and the integral
//! polarization moments of j = 2 → 1 at the resonance.

use stereodyn::ccsolver::{cross_section, solve_all, Transition};
use stereodyn::potential::surrogate_model;
use stereodyn::stereo::{amplitudes, direct_moments, helicity_transform, pddcs, polarization_moments, ThetaGrid};
use stereodyn::units::BOHR2_TO_ANGSTROM2;
use stereodyn::CollisionConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = surrogate_model(38.5, 5.8, 3.0e4, -9.0e4, 1.1)?;
    let cfg = CollisionConfig { e_col: 0.541, ..CollisionConfig::default() };
    let t = Transition::new(2, 1);
    let blocks = solve_all(&cfg, &model)?.blocks;

    let h = helicity_transform(&blocks, t)?;
    let grid = ThetaGrid::gauss_legendre(180)?;
    let amps = amplitudes(&h, &grid)?;
    let mset = pddcs(&amps);
    println!("σ from S-matrix:     {:.6} Å²", cross_section(&blocks, t) * BOHR2_TO_ANGSTROM2);
    println!("σ from amplitudes:   {:.6} Å²", amps.integral_cross_section() * BOHR2_TO_ANGSTROM2);
    println!("hermiticity defect:  {:.2e}", mset.hermiticity_defect());

    let dcs = mset.dcs();
    println!("\nθ (deg)   dσ/dω (Å²/sr)");
    for (i, theta) in grid.degrees().enumerate().step_by(30) {
        println!("{theta:>7.2}   {:.5e}", dcs[i] * BOHR2_TO_ANGSTROM2);
    }

    let pm = polarization_moments(&mset)?;
    let direct = direct_moments(&h)?;
    println!("\nk   s^(k)_0 (quadrature)   s^(k)_0 (direct)");
    for k in 0..=4 {
        println!("{k}   {:+.10}          {:+.10}", pm.get(k, 0)?.re, direct.s0[k as usize]);
    }
    println!("s^(2)_1 = {:.6}", pm.get(2, 1)?);
    Ok(())
}
