//! Build the surrogate interaction, look at its anisotropy and round-trip it
//! through the potential file format.

use stereodyn::potential::{parse_model, surrogate_model, write_model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = surrogate_model(38.5, 5.8, 3.0e4, -9.0e4, 1.1)?;
    println!("{}: λ = {:?}", model.name(), model.lambdas().collect::<Vec<_>>());
    println!("{:>6} {:>12} {:>12} {:>12}", "R", "v0", "v1", "v2");
    for r in [4.5, 5.5, 6.5, 8.0, 10.0, 15.0] {
        println!("{r:>6.1} {:>12.4} {:>12.4} {:>12.4}", model.radial(0, r)?, model.radial(1, r)?, model.radial(2, r)?);
    }
    println!("\nV(6.5 bohr, θ): ");
    for deg in [0.0f64, 45.0, 90.0, 135.0, 180.0] {
        println!("  θ = {deg:>5}°: {:+.4} K", model.evaluate(6.5, deg.to_radians().cos())?);
    }
    let text = write_model(&model);
    assert_eq!(parse_model(&text)?, model);
    println!("\n{text}");
    Ok(())
}
