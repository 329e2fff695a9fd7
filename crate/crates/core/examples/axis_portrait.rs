//! Axis-distribution portraits: a pure m = 0 state, and the j = 2 → 1
//! product moments on and off the resonance.

use stereodyn::ccsolver::{solve_all, Transition};
use stereodyn::potential::surrogate_model;
use stereodyn::stereo::{amplitudes, helicity_transform, pddcs, polarization_moments, portrait, PolarizationMoments, Portrait, ThetaGrid};
use stereodyn::CollisionConfig;

fn sketch(name: &str, p: &Portrait) {
    println!("{name}: normalization {:.12}", p.normalization());
    let n_phi = p.phi.len();
    for (i, th) in p.theta.theta.iter().enumerate().step_by(3) {
        let bar = |m: usize| "#".repeat((p.at(i, m) * 60.0).round() as usize);
        println!("  θ {:>6.1}°  φ=0 {:<24} φ=90 {}", th.to_degrees(), bar(0), bar(n_phi / 4));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    sketch("pure |2 0>", &portrait(&PolarizationMoments::pure_state(2, 0), 24, 8)?);

    let model = surrogate_model(38.5, 5.8, 3.0e4, -9.0e4, 1.1)?;
    let grid = ThetaGrid::gauss_legendre(240)?;
    for e in [0.2, 0.541] {
        let blocks = solve_all(&CollisionConfig { e_col: e, ..CollisionConfig::default() }, &model)?.blocks;
        let mset = pddcs(&amplitudes(&helicity_transform(&blocks, Transition::new(2, 1))?, &grid)?);
        let pm = polarization_moments(&mset)?;
        sketch(&format!("2 → 1 at {e} K (s20 = {:+.3})", pm.get(2, 0)?.re), &portrait(&pm, 24, 8)?);
    }
    Ok(())
}
