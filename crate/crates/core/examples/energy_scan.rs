//! A coarse energy scan of the quenching cross section and the threshold-law
//! slope at the bottom of the grid.

use stereodyn::ccsolver::Transition;
use stereodyn::potential::surrogate_model;
use stereodyn::scan::{energy_scan, log_grid, wigner_slope, ScanSettings};
use stereodyn::CollisionConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = surrogate_model(38.5, 5.8, 3.0e4, -9.0e4, 1.1)?;
    let cfg = CollisionConfig { steps_per_wavelength: 80, ..CollisionConfig::default() };
    let energies = log_grid(1e-3, 3.0, 36);
    let table = energy_scan(&cfg, &model, &energies, &ScanSettings::default())?;
    let t = Transition::new(2, 1);
    println!("{:>10} {:>12} {:>9} {:>10}", "E (K)", "σ 2→1 (Å²)", "s20", "β=0/unpol");
    for (e, row) in table.series(t)? {
        let ratio = row.prep_ics.first().map_or(f64::NAN, |v| v / row.unpolarized);
        println!("{e:>10.4e} {:>12.4} {:>+9.4} {ratio:>10.4}", row.sigma, row.s20());
    }
    println!("\nthreshold slope over 1–3 mK: {:.3} (E^-1/2 gives −0.5)", wigner_slope(&table, t, (1e-3, 3e-3))?);
    Ok(())
}
