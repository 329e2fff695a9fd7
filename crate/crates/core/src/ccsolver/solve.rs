use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use rayon::prelude::*;

use super::propagate::{propagate_with, FarCache};
use super::{build_basis, match_block, radial_plan, CcError, CollisionConfig, RadialPlan, SMatrixBlock};
use crate::potential::PotentialModel;

/// Rotor transition `j → j'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub j: u32,
    pub jp: u32,
}

impl Transition {
    pub fn new(j: u32, jp: u32) -> Self {
        Self { j, jp }
    }
}

/// All blocks at one collision energy.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySolution {
    pub e_col: f64,
    pub plan: RadialPlan,
    /// `J` ascending, parity `+1` before `−1`; empty bases are skipped.
    pub blocks: Vec<SMatrixBlock>,
}

/// Solves one `(J, parity)` block.
pub fn solve_block(
    cfg: &CollisionConfig,
    model: &PotentialModel,
    total_j: u32,
    parity: i32,
) -> Result<SMatrixBlock, CcError> {
    let plan = radial_plan(model, cfg)?;
    let basis = build_basis(cfg, total_j, parity)?;
    let p = propagate_with(&basis, model, cfg, &plan, None)?;
    match_block(&p, &basis, cfg)
}

/// Solves every block `J = 0..=J_max`, both parities. Blocks run in parallel
/// on the current rayon pool; the result order does not depend on scheduling.
pub fn solve_all(cfg: &CollisionConfig, model: &PotentialModel) -> Result<EnergySolution, CcError> {
    let plan = radial_plan(model, cfg)?;
    let mut bases = Vec::new();
    for total_j in 0..=cfg.j_total_max {
        for parity in [1, -1] {
            match build_basis(cfg, total_j, parity) {
                Ok(b) => bases.push(b),
                Err(CcError::EmptyBasis { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let cache: FarCache = Mutex::new(HashMap::new());
    let results: Vec<Result<SMatrixBlock, CcError>> = bases
        .par_iter()
        .map(|basis| {
            let p = propagate_with(basis, model, cfg, &plan, Some(&cache))?;
            match_block(&p, basis, cfg)
        })
        .collect();
    let mut blocks = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (basis, r) in bases.iter().zip(results) {
        match r {
            Ok(b) => blocks.push(b),
            Err(e) => failures.push((basis.total_j, basis.parity, e)),
        }
    }
    if !failures.is_empty() {
        return Err(CcError::Blocks(failures));
    }
    Ok(EnergySolution { e_col: cfg.e_col, plan, blocks })
}

fn entrance_wavenumber(blocks: &[SMatrixBlock], j: u32) -> Option<f64> {
    blocks.iter().find_map(|b| b.open_channels().find(|c| c.0 == j).map(|c| c.2))
}

/// Per entrance partial wave `L`: `σ_L = π/((2j+1)k²) Σ_J (2J+1) Σ_{L'} |δ − S|²` (bohr²).
/// Empty if `j` or `j'` is closed.
pub fn cross_section_by_partial_wave(blocks: &[SMatrixBlock], t: Transition) -> Vec<(u32, f64)> {
    let Some(k) = entrance_wavenumber(blocks, t.j) else {
        return Vec::new();
    };
    let mut by_l: Vec<(u32, f64)> = Vec::new();
    for b in blocks {
        let weight = (2 * b.total_j + 1) as f64;
        let chans: Vec<(usize, u32, u32)> =
            b.open_channels().enumerate().map(|(i, (j, l, _))| (i, j, l)).collect();
        for &(i, _, l) in chans.iter().filter(|c| c.1 == t.j) {
            let mut sum = 0.0;
            for &(o, _, _) in chans.iter().filter(|c| c.1 == t.jp) {
                let delta = if o == i { 1.0 } else { 0.0 };
                sum += (b.s[(o, i)] - delta).norm_sqr();
            }
            match by_l.iter_mut().find(|e| e.0 == l) {
                Some(e) => e.1 += weight * sum,
                None => by_l.push((l, weight * sum)),
            }
        }
    }
    let pref = PI / ((2 * t.j + 1) as f64 * k * k);
    by_l.sort_by_key(|e| e.0);
    by_l.into_iter().map(|(l, s)| (l, pref * s)).collect()
}

/// Integral cross section `σ_{j→j'}` (bohr²); `0` if either level is closed.
pub fn cross_section(blocks: &[SMatrixBlock], t: Transition) -> f64 {
    cross_section_by_partial_wave(blocks, t).iter().map(|e| e.1).sum()
}
