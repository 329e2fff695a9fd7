use super::{ScanError, ScanTable};
use crate::ccsolver::Transition;

/// Least-squares slope of `ln σ` against `ln E` over rows with `E` in `window` (K).
pub fn wigner_slope(table: &ScanTable, t: Transition, window: (f64, f64)) -> Result<f64, ScanError> {
    let pts: Vec<(f64, f64)> = table
        .series(t)?
        .into_iter()
        .filter(|(e, r)| *e >= window.0 && *e <= window.1 && r.sigma > 0.0)
        .map(|(e, r)| (e.ln(), r.sigma.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(ScanError::WindowTooSmall { lo: window.0, hi: window.1, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
