//! Cross sections for a rotor prepared with its axis along β: the directed
//! m = 0 state at 0°, 90° and the magic angle, next to the unpolarized value.

use stereodyn::ccsolver::{solve_all, Transition};
use stereodyn::potential::surrogate_model;
use stereodyn::stereo::{
    amplitudes, helicity_transform, pddcs, polarization_moments, prep_dcs, prep_ics, Preparation, ThetaGrid,
    MAGIC_ANGLE_DEG,
};
use stereodyn::units::BOHR2_TO_ANGSTROM2;
use stereodyn::CollisionConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = surrogate_model(38.5, 5.8, 3.0e4, -9.0e4, 1.1)?;
    let t = Transition::new(2, 1);
    let grid = ThetaGrid::gauss_legendre(360)?;
    let preps = [
        Preparation::directed(2, 0.0, 0.0)?,
        Preparation::directed(2, 90.0, 0.0)?,
        Preparation::directed(2, MAGIC_ANGLE_DEG, 0.0)?,
        Preparation::unpolarized(2),
    ];

    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "E (K)", "β = 0°", "β = 90°", "magic", "unpolarized");
    for e in [0.1, 0.4, 0.541, 0.7, 1.5] {
        let blocks = solve_all(&CollisionConfig { e_col: e, ..CollisionConfig::default() }, &model)?.blocks;
        let mset = pddcs(&amplitudes(&helicity_transform(&blocks, t)?, &grid)?);
        let pm = polarization_moments(&mset)?;
        let v: Vec<String> =
            preps.iter().map(|p| prep_ics(&pm, p).map(|s| format!("{:>12.4}", s * BOHR2_TO_ANGSTROM2))).collect::<Result<_, _>>()?;
        println!("{e:>8} {}", v.join(" "));
        if e == 0.541 {
            let side = prep_dcs(&mset, &preps[1])?;
            let head = prep_dcs(&mset, &preps[0])?;
            let i = grid.len() / 2;
            println!("{:>8} dσ/dω at θ = {:.1}°: β=0° {:.4e}, β=90° {:.4e} Å²/sr", "", grid.theta[i].to_degrees(), head.values[i] * BOHR2_TO_ANGSTROM2, side.values[i] * BOHR2_TO_ANGSTROM2);
        }
    }
    Ok(())
}
