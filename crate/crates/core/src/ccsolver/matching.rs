use nalgebra::DMatrix;
use num_complex::Complex64;

use super::propagate::Propagated;
use super::smatrix::{symmetry_defect, unitarity_defect};
use super::{BlockDiagnostics, CcError, ChannelBasis, CollisionConfig, SMatrixBlock};
use crate::angular::{modified_riccati_log_derivatives, riccati_bessel_pair};

/// Builds the S-matrix block from a propagated log-derivative.
///
/// Closed channels are eliminated at `r_mid` against their decaying
/// solutions; the open channels are decomposed into Riccati–Bessel
/// components, carried to `r_match` by the far-region transfers, and
/// `K` is read off with flux-normalized functions `ĵ/√k`, `n̂/√k`.
pub fn match_block(p: &Propagated, basis: &ChannelBasis, cfg: &CollisionConfig) -> Result<SMatrixBlock, CcError> {
    let n = basis.len();
    let h2m = cfg.hbar2_over_2mu();
    let r = p.plan.r_mid;
    let open = basis.open_indices();
    let closed: Vec<usize> = (0..n).filter(|i| !basis.channels[*i].open).collect();
    let y = DMatrix::from_row_slice(n, n, &p.y);
    let mut y_eff = y.select_rows(&open).select_columns(&open);
    if !closed.is_empty() {
        let mut d = -y.select_rows(&closed).select_columns(&closed);
        for (c, &i) in closed.iter().enumerate() {
            let ch = &basis.channels[i];
            let kappa = ((ch.energy - basis.e_total) / h2m).sqrt();
            d[(c, c)] += kappa * modified_riccati_log_derivatives(ch.l, kappa * r).1;
        }
        let y_co = y.select_rows(&closed).select_columns(&open);
        let y_oc = y.select_rows(&open).select_columns(&closed);
        let x = d.lu().solve(&y_co).ok_or_else(|| CcError::Propagation {
            r,
            message: "closed-channel elimination is singular".into(),
        })?;
        y_eff += y_oc * x;
    }
    let ls: Vec<u32> = open.iter().map(|&i| basis.channels[i].l).collect();
    let far: Vec<[[f64; 2]; 2]> = open.iter().map(|&i| p.far[i].m).collect();
    let k = k_matrix(&y_eff, &ls, &basis.wavenumbers, r, &far).ok_or_else(|| CcError::Propagation {
        r: p.plan.r_match,
        message: "singular regular-wave amplitude matrix".into(),
    })?;
    let s = s_from_k(&k);
    let unitarity = unitarity_defect(&s);
    let symmetry = symmetry_defect(&s);
    let block = SMatrixBlock {
        e_col: cfg.e_col,
        total_j: basis.total_j,
        parity: basis.parity,
        basis: basis.clone(),
        s,
        diagnostics: Some(BlockDiagnostics {
            r_mid: p.plan.r_mid,
            r_match: p.plan.r_match,
            inner_steps: p.inner_steps,
            far_steps: open.iter().map(|&i| p.far[i].steps).sum(),
            n_closed: closed.len(),
            unitarity_defect: unitarity,
            symmetry_defect: symmetry,
        }),
    };
    block.check()?;
    Ok(block)
}

/// Open-channel K-matrix from a log-derivative `y` (row-major, all channels
/// open) at radius `r`, for channels with orbital momenta `ls` and wavenumbers `ks`.
pub fn k_matrix_from_log_derivative(y: &[f64], ls: &[u32], ks: &[f64], r: f64) -> Option<DMatrix<f64>> {
    let n = ls.len();
    if y.len() != n * n || ks.len() != n {
        return None;
    }
    let y = DMatrix::from_row_slice(n, n, y);
    let far = vec![[[1.0, 0.0], [0.0, 1.0]]; n];
    k_matrix(&y, ls, ks, r, &far)
}

fn k_matrix(y: &DMatrix<f64>, ls: &[u32], ks: &[f64], r: f64, far: &[[[f64; 2]; 2]]) -> Option<DMatrix<f64>> {
    let n = ls.len();
    // ψ(r) = 1, ψ'(r) = Y; per row i, ψ = ĵ A + n̂ B with Wronskian −k
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        let k = ks[i];
        let rb = riccati_bessel_pair(ls[i], k * r);
        let m = far[i];
        for c in 0..n {
            let psi = if i == c { 1.0 } else { 0.0 };
            let dpsi = y[(i, c)];
            let a0 = (k * rb.dn * psi - rb.n * dpsi) / -k;
            let b0 = (rb.j * dpsi - k * rb.dj * psi) / -k;
            a[(i, c)] = m[0][0] * a0 + m[0][1] * b0;
            b[(i, c)] = m[1][0] * a0 + m[1][1] * b0;
        }
    }
    // K = diag(√k) B A⁻¹ diag(1/√k); B A⁻¹ = (A⁻ᵀ Bᵀ)ᵀ
    let bat = a.transpose().lu().solve(&b.transpose())?;
    let mut kmat = bat.transpose();
    for i in 0..n {
        for c in 0..n {
            kmat[(i, c)] *= (ks[i] / ks[c]).sqrt();
        }
    }
    kmat.iter().all(|v| v.is_finite()).then_some(kmat)
}

/// `S = (1 + iK)(1 − iK)⁻¹`.
pub fn s_from_k(k: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = k.nrows();
    let ik = k.map(|v| Complex64::new(0.0, v));
    let id = DMatrix::<Complex64>::identity(n, n);
    let num = &id + &ik;
    let den = &id - &ik;
    // S = num · den⁻¹  ⇔  denᵀ Sᵀ = numᵀ
    let st = den.transpose().lu().solve(&num.transpose()).expect("1 − iK is invertible for real K");
    st.transpose()
}
