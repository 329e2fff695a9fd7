use super::{ResonanceReport, ScanError, ScanTable, TransitionRow};

/// Stereodynamics around one resonance of the scanned transition.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismDigest {
    pub e_peak: f64,
    /// `(E, s^(2)_0)` on the low flank, at the peak and on the high flank.
    /// Flanks sit at `E_peak ∓ 2Γ` (nearest rows), or at the neighbouring
    /// rows when no width is known.
    pub s20_below: (f64, f64),
    pub s20_at: (f64, f64),
    pub s20_above: (f64, f64),
    /// `s^(2)_0` from the restricted partial wave at the peak.
    pub s20_restricted: Option<f64>,
    /// `σ(β = 0°) / σ(unpolarized)` at the peak.
    pub suppression: Option<f64>,
    /// The same ratio at the lowest scanned energy, a control far from the peak.
    pub control_suppression: Option<f64>,
    /// Peak value over the log-log flank interpolation, unpolarized.
    pub flank_ratio_unpolarized: f64,
    /// The same for the `β = 0°` preparation.
    pub flank_ratio_beta0: Option<f64>,
    /// `s^(2)_0` at the peak is opposite in sign to a flank, or beyond both flanks.
    pub s20_switches: bool,
}

fn nearest(series: &[(f64, &TransitionRow)], e: f64) -> usize {
    (0..series.len())
        .min_by(|&a, &b| (series[a].0 / e).ln().abs().total_cmp(&(series[b].0 / e).ln().abs()))
        .expect("non-empty series")
}

fn flank_ratio(series: &[(f64, &TransitionRow)], lo: usize, at: usize, hi: usize, f: impl Fn(&TransitionRow) -> f64) -> f64 {
    let (e0, e1, e) = (series[lo].0, series[hi].0, series[at].0);
    let (y0, y1) = (f(series[lo].1), f(series[hi].1));
    let w = (e / e0).ln() / (e1 / e0).ln();
    f(series[at].1) / (y0.ln() + w * (y1 / y0).ln()).exp()
}

/// For each report: `s^(2)_0` across the peak, the restricted moment and the
/// `β = 0°` behaviour. Ratios need a `β = 0°` prepared column.
pub fn mechanism_summary(table: &ScanTable, reports: &[ResonanceReport]) -> Result<Vec<MechanismDigest>, ScanError> {
    let mut out = Vec::new();
    for r in reports {
        let series = table.series(r.transition)?;
        let Some(i) = series.iter().position(|s| s.0 == r.grid_energy) else { continue };
        let (lo, hi) = match r.width() {
            Some(g) if r.e_peak - 2.0 * g > series[0].0 => (nearest(&series, r.e_peak - 2.0 * g), nearest(&series, r.e_peak + 2.0 * g)),
            _ => (i.saturating_sub(1), (i + 1).min(series.len() - 1)),
        };
        let (lo, hi) = (lo.min(i.saturating_sub(1)), hi.max((i + 1).min(series.len() - 1)));
        let beta0 = table.settings.prep_betas.iter().position(|&b| b == 0.0);
        let prep0 = |row: &TransitionRow| beta0.and_then(|k| row.prep_ics.get(k).copied());
        let ratio = |row: &TransitionRow| prep0(row).filter(|_| row.unpolarized > 0.0).map(|v| v / row.unpolarized);
        let at = |k: usize| (series[k].0, series[k].1.s20());
        let (below, here, above) = (at(lo), at(i), at(hi));
        let sign_flip = here.1.signum() != below.1.signum() || here.1.signum() != above.1.signum();
        let extremum = (here.1 > below.1 && here.1 > above.1) || (here.1 < below.1 && here.1 < above.1);
        out.push(MechanismDigest {
            e_peak: r.e_peak,
            s20_below: below,
            s20_at: here,
            s20_above: above,
            s20_restricted: series[i].1.s20_restricted,
            suppression: ratio(series[i].1),
            control_suppression: ratio(series[0].1),
            flank_ratio_unpolarized: flank_ratio(&series, lo, i, hi, |r| r.sigma),
            flank_ratio_beta0: beta0.map(|_| flank_ratio(&series, lo, i, hi, |r| prep0(r).unwrap_or(0.0))),
            s20_switches: sign_flip || extremum,
        });
    }
    Ok(out)
}
