use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StereoError;
use crate::angular::cg;
use crate::ccsolver::{SMatrixBlock, Transition};

/// Helicity-frame transition matrices `T^J_{Ω'Ω} = S^J_{Ω'Ω} − δ_{jj'}δ_{ΩΩ'}`
/// for one transition, `J` ascending. Rows are `Ω' + j'`, columns `Ω + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HelicityMatrices {
    pub transition: Transition,
    pub e_col: f64,
    pub k_in: f64,
    pub k_out: f64,
    pub t: Vec<(u32, DMatrix<Complex64>)>,
}

impl HelicityMatrices {
    /// `S^J_{Ω'Ω}` (adds the identity back for elastic transitions).
    pub fn s_matrix(&self, index: usize) -> DMatrix<Complex64> {
        let mut s = self.t[index].1.clone();
        if self.transition.j == self.transition.jp {
            for i in 0..s.nrows() {
                s[(i, i)] += Complex64::new(1.0, 0.0);
            }
        }
        s
    }
}

fn i_power(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `S^J_{Ω'Ω} = Σ_{L L'} i^{L−L'} √((2L+1)(2L'+1))/(2J+1) ⟨jΩ L0|JΩ⟩⟨j'Ω' L'0|JΩ'⟩ S^J_{j'L', jL}`.
pub fn helicity_transform(blocks: &[SMatrixBlock], t: Transition) -> Result<HelicityMatrices, StereoError> {
    transform(blocks, t, None)
}

/// As [`helicity_transform`] keeping only TAM elements whose entrance partial wave is `l`.
pub fn helicity_transform_restricted(
    blocks: &[SMatrixBlock],
    t: Transition,
    l: u32,
) -> Result<HelicityMatrices, StereoError> {
    transform(blocks, t, Some(l))
}

fn transform(blocks: &[SMatrixBlock], t: Transition, only_l: Option<u32>) -> Result<HelicityMatrices, StereoError> {
    let first = blocks.first().ok_or(StereoError::NoBlocks)?;
    let e_col = first.e_col;
    if blocks.iter().any(|b| b.e_col != e_col) {
        return Err(StereoError::NoBlocks);
    }
    let find_k = |j: u32| {
        blocks
            .iter()
            .find_map(|b| b.open_channels().find(|c| c.0 == j).map(|c| c.2))
            .ok_or(StereoError::ClosedLevel(j))
    };
    let k_in = find_k(t.j)?;
    let k_out = find_k(t.jp)?;
    let max_j = blocks.iter().map(|b| b.total_j).max().unwrap_or(0);
    for total_j in 0..=max_j {
        for parity in [1, -1] {
            // blocks are needed wherever the entrance level has a channel
            let needed = (total_j.abs_diff(t.j)..=total_j + t.j)
                .any(|l| if (t.j + l) % 2 == 0 { parity == 1 } else { parity == -1 });
            if needed && !blocks.iter().any(|b| b.total_j == total_j && b.parity == parity) {
                return Err(StereoError::IncompleteBlocks { total_j, parity });
            }
        }
    }
    let (j, jp) = (t.j, t.jp);
    let (nj, njp) = (2 * j as usize + 1, 2 * jp as usize + 1);
    let mut out = Vec::new();
    for total_j in 0..=max_j {
        let mut m = DMatrix::<Complex64>::zeros(njp, nj);
        for b in blocks.iter().filter(|b| b.total_j == total_j) {
            let chans: Vec<(usize, u32, u32)> = b.open_channels().enumerate().map(|(i, c)| (i, c.0, c.1)).collect();
            for &(ii, _, l) in chans.iter().filter(|c| c.1 == j) {
                if only_l.is_some_and(|sel| sel != l) {
                    continue;
                }
                for &(oo, _, lp) in chans.iter().filter(|c| c.1 == jp) {
                    let mut tel = b.s[(oo, ii)];
                    if oo == ii {
                        tel -= 1.0;
                    }
                    if tel == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let pref = i_power(l as i64 - lp as i64)
                        * (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt()
                        / (2 * total_j + 1) as f64
                        * tel;
                    for (c, omega) in (-(j as i32)..=j as i32).enumerate() {
                        let a = cg(j, omega, l, 0, total_j, omega);
                        if a == 0.0 {
                            continue;
                        }
                        for (r, omega_p) in (-(jp as i32)..=jp as i32).enumerate() {
                            let bcg = cg(jp, omega_p, lp, 0, total_j, omega_p);
                            if bcg != 0.0 {
                                m[(r, c)] += pref * (a * bcg);
                            }
                        }
                    }
                }
            }
        }
        out.push((total_j, m));
    }
    Ok(HelicityMatrices { transition: t, e_col, k_in, k_out, t: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccsolver::{build_basis, CollisionConfig};

    fn s_wave_blocks(value: Complex64) -> Vec<SMatrixBlock> {
        let cfg = CollisionConfig { j_initial: 0, j_max: 0, e_col: 1.0, j_total_max: 2, ..Default::default() };
        (0..=2)
            .map(|total_j| {
                let parity = if total_j % 2 == 0 { 1 } else { -1 };
                let basis = build_basis(&cfg, total_j, parity).unwrap();
                let s = DMatrix::from_element(1, 1, if total_j == 1 { value } else { Complex64::new(1.0, 0.0) });
                SMatrixBlock { e_col: 1.0, total_j, parity, basis, s, diagnostics: None }
            })
            .collect()
    }

    #[test]
    fn structureless_element_passes_through() {
        let v = Complex64::from_polar(1.0, 0.7);
        let h = helicity_transform(&s_wave_blocks(v), Transition::new(0, 0)).unwrap();
        assert_eq!(h.t.len(), 3);
        assert!((h.s_matrix(1)[(0, 0)] - v).norm() < 1e-15);
        assert!(h.t[0].1[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn missing_parity_is_reported() {
        let cfg = CollisionConfig { e_col: 10.0, j_total_max: 1, ..Default::default() };
        let blocks: Vec<_> = [(0, 1), (1, 1)]
            .into_iter()
            .map(|(total_j, parity)| {
                let basis = build_basis(&cfg, total_j, parity).unwrap();
                let n = basis.n_open();
                SMatrixBlock { e_col: 10.0, total_j, parity, basis, s: DMatrix::identity(n, n), diagnostics: None }
            })
            .collect();
        let err = helicity_transform(&blocks, Transition::new(2, 1)).unwrap_err();
        assert_eq!(err, StereoError::IncompleteBlocks { total_j: 1, parity: -1 });
    }

    #[test]
    fn closed_exit_level_is_an_error() {
        let err = helicity_transform(&s_wave_blocks(Complex64::new(1.0, 0.0)), Transition::new(0, 1)).unwrap_err();
        assert_eq!(err, StereoError::ClosedLevel(1));
    }
}
