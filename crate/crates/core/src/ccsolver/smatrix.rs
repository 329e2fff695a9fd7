use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CcError, ChannelBasis};

/// Unitarity and symmetry tolerance asserted on every block.
pub const S_TOLERANCE: f64 = 1e-8;

/// Numerical record of how a block was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagnostics {
    pub r_mid: f64,
    pub r_match: f64,
    pub inner_steps: usize,
    pub far_steps: usize,
    pub n_closed: usize,
    pub unitarity_defect: f64,
    pub symmetry_defect: f64,
}

/// S-matrix of one `(J, parity)` block over its open channels, indexed by
/// open-channel position in [`ChannelBasis`] order: `s[(out, in)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrixBlock {
    pub e_col: f64,
    pub total_j: u32,
    pub parity: i32,
    pub basis: ChannelBasis,
    pub s: DMatrix<Complex64>,
    /// `None` for blocks read from a file.
    pub diagnostics: Option<BlockDiagnostics>,
}

impl SMatrixBlock {
    /// `‖S†S − 1‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.s)
    }

    /// `‖S − Sᵀ‖_max`.
    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.s)
    }

    pub fn check(&self) -> Result<(), CcError> {
        for (what, defect) in [("unitarity", self.unitarity_defect()), ("symmetry", self.symmetry_defect())] {
            if !(defect < S_TOLERANCE) {
                return Err(CcError::Matching { total_j: self.total_j, parity: self.parity, what, defect });
            }
        }
        Ok(())
    }

    /// Open channels as `(j, L, k)`, in matrix order.
    pub fn open_channels(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.basis.channels.iter().filter(|c| c.open).zip(&self.basis.wavenumbers).map(|(c, &k)| (c.j, c.l, k))
    }

    /// `S_{(j' L'), (j L)}`, or `None` if either channel is not open in this block.
    pub fn element(&self, jp: u32, lp: u32, j: u32, l: u32) -> Option<Complex64> {
        let out = self.basis.open_position(jp, lp)?;
        let inp = self.basis.open_position(j, l)?;
        Some(self.s[(out, inp)])
    }

    /// Eigenphase sum `arg(det S)/2`, defined modulo π; unwrap across an energy grid.
    pub fn eigenphase_sum(&self) -> f64 {
        let n = self.s.nrows();
        if n == 0 {
            return 0.0;
        }
        let det = self.s.clone().lu().determinant();
        0.5 * det.arg()
    }
}

pub(crate) fn unitarity_defect(s: &DMatrix<Complex64>) -> f64 {
    let p = s.adjoint() * s;
    let mut m: f64 = 0.0;
    for i in 0..p.nrows() {
        for k in 0..p.ncols() {
            let target = if i == k { 1.0 } else { 0.0 };
            m = m.max((p[(i, k)] - target).norm());
        }
    }
    m
}

pub(crate) fn symmetry_defect(s: &DMatrix<Complex64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..s.nrows() {
        for k in i + 1..s.ncols() {
            m = m.max((s[(i, k)] - s[(k, i)]).norm());
        }
    }
    m
}
