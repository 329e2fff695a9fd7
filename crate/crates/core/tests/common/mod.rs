//! Shared oracles for the integration tests.
#![allow(dead_code)]

pub mod racah;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stereodyn::ccsolver::{build_basis, s_from_k, CollisionConfig, SMatrixBlock};

pub const RANDOM_J_TOTAL_MAX: u32 = 6;

/// j = 0, 1, 2 open and j = 3 closed.
pub fn random_config() -> CollisionConfig {
    CollisionConfig { e_col: 10.0, j_total_max: RANDOM_J_TOTAL_MAX, ..Default::default() }
}

/// Symmetric unitary `S` from a random real symmetric `K`.
pub fn random_s(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let mut k = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rng.gen_range(-1.5..1.5);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    s_from_k(&k)
}

/// Random S for every block; `keep` selects blocks that scatter, the rest
/// are the identity.
pub fn random_blocks(seed: u64, keep: impl Fn(u32, i32) -> bool) -> Vec<SMatrixBlock> {
    let cfg = random_config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = Vec::new();
    for total_j in 0..=RANDOM_J_TOTAL_MAX {
        for parity in [1, -1] {
            let Ok(basis) = build_basis(&cfg, total_j, parity) else { continue };
            let n = basis.n_open();
            let s = if keep(total_j, parity) { random_s(&mut rng, n) } else { DMatrix::identity(n, n) };
            blocks.push(SMatrixBlock { e_col: cfg.e_col, total_j, parity, basis, s, diagnostics: None });
        }
    }
    blocks
}
