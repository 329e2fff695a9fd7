//! Solve every (J, parity) block at one energy, check the S-matrices and
//! report the quenching cross sections.

use stereodyn::ccsolver::{cross_section, cross_section_by_partial_wave, read_smatrix, solve_all, write_smatrix, SMatrixSet, Transition};
use stereodyn::potential::surrogate_model;
use stereodyn::units::BOHR2_TO_ANGSTROM2;
use stereodyn::CollisionConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = surrogate_model(38.5, 5.8, 3.0e4, -9.0e4, 1.1)?;
    let cfg = CollisionConfig { e_col: 0.1, ..CollisionConfig::default() };
    let sol = solve_all(&cfg, &model)?;
    println!("E = {} K, matched at {:.1} bohr, {} blocks", cfg.e_col, sol.plan.r_match, sol.blocks.len());
    for b in sol.blocks.iter().take(6) {
        println!(
            "  J = {:>2} parity {:+}: {} open of {}, |S†S − 1| = {:.1e}, |S − Sᵀ| = {:.1e}",
            b.total_j,
            b.parity,
            b.basis.open_indices().len(),
            b.basis.len(),
            b.unitarity_defect(),
            b.symmetry_defect()
        );
    }
    for t in [Transition::new(2, 1), Transition::new(2, 0)] {
        let by_l = cross_section_by_partial_wave(&sol.blocks, t);
        let total = cross_section(&sol.blocks, t) * BOHR2_TO_ANGSTROM2;
        let lead: Vec<String> = by_l.iter().take(4).map(|(l, s)| format!("L{l} {:.3}", s * BOHR2_TO_ANGSTROM2)).collect();
        println!("σ({} → {}) = {total:.4} Å²  [{}]", t.j, t.jp, lead.join(", "));
    }

    let set = SMatrixSet { mu: cfg.mu, e_initial: cfg.rotor_energy(cfg.j_initial), blocks: sol.blocks };
    let text = write_smatrix(&set);
    let back = read_smatrix(&text)?;
    let exact = back.blocks.iter().zip(&set.blocks).all(|(a, b)| a.s == b.s && a.basis == b.basis);
    println!("S-matrix file: {} lines, S and channels read back exactly: {exact}", text.lines().count());
    Ok(())
}
