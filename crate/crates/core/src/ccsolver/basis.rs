use super::{CcError, CollisionConfig};
use crate::angular::triangle;

/// One asymptotic channel `(j, L)` of a `(J, parity)` block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub j: u32,
    pub l: u32,
    /// Rotor energy `B j(j+1)` (K).
    pub energy: f64,
    pub open: bool,
}

/// Channel list for one `(J, parity)` block, ascending in `(j, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBasis {
    pub total_j: u32,
    /// `(−1)^{j+L}`, ±1.
    pub parity: i32,
    /// Total energy `E_col + E_{j_initial}` (K).
    pub e_total: f64,
    pub channels: Vec<Channel>,
    /// Wavenumbers (bohr⁻¹) of the open channels, in channel order.
    pub wavenumbers: Vec<f64>,
}

impl ChannelBasis {
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn open_indices(&self) -> Vec<usize> {
        self.channels.iter().enumerate().filter(|(_, c)| c.open).map(|(i, _)| i).collect()
    }

    pub fn n_open(&self) -> usize {
        self.channels.iter().filter(|c| c.open).count()
    }

    /// Index within the open subspace of channel `(j, L)`.
    pub fn open_position(&self, j: u32, l: u32) -> Option<usize> {
        self.channels.iter().filter(|c| c.open).position(|c| c.j == j && c.l == l)
    }

    /// `I·(−1)^J`: the helicity-frame parity. `−1` blocks carry no `Ω = 0` component.
    pub fn helicity_parity(&self) -> i32 {
        if self.total_j % 2 == 0 {
            self.parity
        } else {
            -self.parity
        }
    }
}

/// Enumerates the channels `(j ≤ j_max, L)` with `|J − j| ≤ L ≤ J + j` and
/// `(−1)^{j+L} = parity`; closed channels are kept only within `e_cut` of the
/// total energy.
pub fn build_basis(cfg: &CollisionConfig, total_j: u32, parity: i32) -> Result<ChannelBasis, CcError> {
    cfg.validate()?;
    if parity != 1 && parity != -1 {
        return Err(CcError::InvalidConfig(format!("parity must be ±1, got {parity}")));
    }
    let e_total = cfg.total_energy();
    let mut channels = Vec::new();
    let mut wavenumbers = Vec::new();
    for j in 0..=cfg.j_max {
        let energy = cfg.rotor_energy(j);
        let open = e_total - energy > 0.0;
        if !open && energy - e_total >= cfg.e_cut {
            continue;
        }
        for l in total_j.abs_diff(j)..=(total_j + j) {
            if !triangle(j, l, total_j) {
                continue;
            }
            let p = if (j + l) % 2 == 0 { 1 } else { -1 };
            if p != parity {
                continue;
            }
            channels.push(Channel { j, l, energy, open });
            if open {
                wavenumbers.push(cfg.wavenumber(e_total - energy));
            }
        }
    }
    if channels.is_empty() {
        return Err(CcError::EmptyBasis { total_j, parity });
    }
    Ok(ChannelBasis { total_j, parity, e_total, channels, wavenumbers })
}
