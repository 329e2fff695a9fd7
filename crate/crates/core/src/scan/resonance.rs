use std::fmt::Write as _;

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{storage::Owned, DVector, Dyn, Matrix, OMatrix, Vector6, U6};

use super::{ScanError, ScanTable, TransitionRow};
use crate::ccsolver::Transition;

pub const RESONANCE_SCHEMA: &str = "# stereodyn-resonances v1";

/// `σ(E) = A (Γ/2)² / ((E − E0)² + (Γ/2)²) + b0 + b1 u + b2 u²` with
/// `u = ln(E / E_ref)`, a background that follows threshold power laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreitWignerFit {
    pub e0: f64,
    pub gamma: f64,
    pub amplitude: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub e_ref: f64,
    /// RMS of the relative residuals.
    pub rel_rms: f64,
    pub points: usize,
}

impl BreitWignerFit {
    pub fn background(&self, e: f64) -> f64 {
        let u = (e / self.e_ref).ln();
        self.b0 + u * (self.b1 + u * self.b2)
    }

    pub fn eval(&self, e: f64) -> f64 {
        let h = 0.5 * self.gamma;
        self.amplitude * h * h / ((e - self.e0).powi(2) + h * h) + self.background(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub transition: Transition,
    /// Grid energy of the local maximum.
    pub grid_energy: f64,
    /// Fitted `E0` when the fit converged, else [`Self::grid_energy`].
    pub e_peak: f64,
    pub fit: Option<BreitWignerFit>,
    /// Why the fit fields are absent.
    pub diagnostic: Option<String>,
    pub sigma_peak: f64,
    /// Log-log interpolation between the minima bracketing the peak.
    pub background: f64,
    /// `σ_peak / background` at the grid maximum.
    pub peak_over_background: f64,
    /// Block with the largest share of the background-subtracted peak.
    pub block: Option<(u32, i32)>,
    pub block_share: f64,
    pub dominant_l: Option<u32>,
    pub l_share: f64,
}

impl ResonanceReport {
    pub fn width(&self) -> Option<f64> {
        self.fit.map(|f| f.gamma)
    }

    /// The responsible block carries at least 80% of the peak.
    pub fn single_block(&self) -> bool {
        self.block.is_some() && self.block_share >= 0.8
    }

    /// `I·(−1)^J = −1`: the block has no `Ω = 0` component.
    pub fn omega_zero_excluded(&self) -> Option<bool> {
        self.block.map(|(j, p)| p * if j % 2 == 0 { 1 } else { -1 } == -1)
    }
}

/// Peaks with relative prominence ≥ `prominence`, Breit–Wigner fitted.
pub fn find_resonances(table: &ScanTable, t: Transition, prominence: f64) -> Result<Vec<ResonanceReport>, ScanError> {
    find_resonances_in(table, t, prominence, true)
}

fn loglog_interp(e: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    if a.1 <= 0.0 || b.1 <= 0.0 || a.0 == b.0 {
        let w = if a.0 == b.0 { 0.5 } else { (e - a.0) / (b.0 - a.0) };
        return a.1 + w * (b.1 - a.1);
    }
    let w = (e / a.0).ln() / (b.0 / a.0).ln();
    (a.1.ln() + w * (b.1 / a.1).ln()).exp()
}

pub fn find_resonances_in(
    table: &ScanTable,
    t: Transition,
    prominence: f64,
    fit: bool,
) -> Result<Vec<ResonanceReport>, ScanError> {
    let series = table.series(t)?;
    let e: Vec<f64> = series.iter().map(|s| s.0).collect();
    let s: Vec<f64> = series.iter().map(|s| s.1.sigma).collect();
    let n = s.len();
    let mut out = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(s[i] > s[i - 1] && s[i] >= s[i + 1]) {
            continue;
        }
        // walk out to the lowest point before higher ground on each side
        let mut lm = i;
        let mut k = i;
        while k > 0 && s[k - 1] <= s[i] {
            k -= 1;
            if s[k] < s[lm] {
                lm = k;
            }
        }
        let mut rm = i;
        let mut k = i;
        while k + 1 < n && s[k + 1] <= s[i] {
            k += 1;
            if s[k] < s[rm] {
                rm = k;
            }
        }
        if lm == i || rm == i {
            continue;
        }
        let base = s[lm].max(s[rm]);
        if !(s[i] >= (1.0 + prominence) * base) {
            continue;
        }
        let background = loglog_interp(e[i], (e[lm], s[lm]), (e[rm], s[rm]));
        let (block, block_share) = attribute(
            &series[i].1.blocks.iter().map(|b| ((b.0, b.1), b.2)).collect::<Vec<_>>(),
            |key| {
                let at = |r: &TransitionRow| r.blocks.iter().find(|b| (b.0, b.1) == key).map_or(0.0, |b| b.2);
                loglog_interp(e[i], (e[lm], at(series[lm].1)), (e[rm], at(series[rm].1)))
            },
        );
        let (dominant_l, l_share) = attribute(
            &series[i].1.sigma_by_l.iter().enumerate().map(|(l, &v)| (l as u32, v)).collect::<Vec<_>>(),
            |l| {
                let at = |r: &TransitionRow| r.sigma_by_l.get(l as usize).copied().unwrap_or(0.0);
                loglog_interp(e[i], (e[lm], at(series[lm].1)), (e[rm], at(series[rm].1)))
            },
        );
        let mut report = ResonanceReport {
            transition: t,
            grid_energy: e[i],
            e_peak: e[i],
            fit: None,
            diagnostic: None,
            sigma_peak: s[i],
            background,
            peak_over_background: s[i] / background,
            block,
            block_share,
            dominant_l,
            l_share,
        };
        if fit {
            match fit_breit_wigner(&e, &s, i, lm, rm) {
                Ok(f) if f.e0 > e[0] && f.e0 < e[n - 1] => {
                    report.e_peak = f.e0;
                    report.fit = Some(f);
                }
                Ok(f) => report.diagnostic = Some(format!("fitted E0 = {} K falls outside the scan", f.e0)),
                Err(msg) => report.diagnostic = Some(msg),
            }
        }
        out.push(report);
    }
    Ok(out)
}

/// Largest background-subtracted contribution and its share of the total excess.
fn attribute<K: Copy>(peak: &[(K, f64)], background: impl Fn(K) -> f64) -> (Option<K>, f64) {
    let excess: Vec<(K, f64)> = peak.iter().map(|&(k, v)| (k, v - background(k))).collect();
    let total: f64 = excess.iter().map(|x| x.1).sum();
    match excess.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)) {
        Some((k, v)) if total > 0.0 && v > 0.0 => (Some(k), v / total),
        _ => (None, 0.0),
    }
}

struct BwProblem<'a> {
    e: &'a [f64],
    s: &'a [f64],
    e_ref: f64,
    p: Vector6<f64>,
}

impl LeastSquaresProblem<f64, Dyn, U6> for BwProblem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U6>;
    type ParameterStorage = Owned<f64, U6>;

    fn set_params(&mut self, p: &Vector6<f64>) {
        self.p = *p;
    }

    fn params(&self) -> Vector6<f64> {
        self.p
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let f = self.model();
        Some(DVector::from_iterator(self.e.len(), self.e.iter().zip(self.s).map(|(&e, &s)| (f.eval(e) - s) / s)))
    }

    fn jacobian(&self) -> Option<OMatrix<f64, Dyn, U6>> {
        let [e0, gamma, a] = [self.p[0], self.p[1], self.p[2]];
        let h = 0.5 * gamma;
        let mut jac = Matrix::<f64, Dyn, U6, Owned<f64, Dyn, U6>>::zeros(self.e.len());
        for (i, (&e, &s)) in self.e.iter().zip(self.s).enumerate() {
            let x = e - e0;
            let d = x * x + h * h;
            jac[(i, 0)] = a * h * h * 2.0 * x / (d * d) / s;
            jac[(i, 1)] = a * h * x * x / (d * d) / s;
            jac[(i, 2)] = h * h / d / s;
            jac[(i, 3)] = 1.0 / s;
            let u = (e / self.e_ref).ln();
            jac[(i, 4)] = u / s;
            jac[(i, 5)] = u * u / s;
        }
        Some(jac)
    }
}

impl BwProblem<'_> {
    fn model(&self) -> BreitWignerFit {
        BreitWignerFit {
            e0: self.p[0],
            gamma: self.p[1],
            amplitude: self.p[2],
            b0: self.p[3],
            b1: self.p[4],
            b2: self.p[5],
            e_ref: self.e_ref,
            rel_rms: 0.0,
            points: self.e.len(),
        }
    }
}

fn fit_breit_wigner(e: &[f64], s: &[f64], i: usize, lm: usize, rm: usize) -> Result<BreitWignerFit, String> {
    let bg = |x: f64| loglog_interp(x, (e[lm], s[lm]), (e[rm], s[rm]));
    let amplitude = s[i] - bg(e[i]);
    // half-maximum crossings for the initial width
    let half = |range: &mut dyn Iterator<Item = usize>| {
        let mut prev = i;
        for k in range {
            if s[k] - bg(e[k]) < 0.5 * amplitude {
                let (y0, y1) = (s[k] - bg(e[k]), s[prev] - bg(e[prev]));
                let w = (0.5 * amplitude - y0) / (y1 - y0);
                return e[k] + w * (e[prev] - e[k]);
            }
            prev = k;
        }
        e[prev]
    };
    let lo = half(&mut (lm..i).rev());
    let hi = half(&mut (i + 1..=rm));
    let spacing = 0.5 * (e[i + 1] - e[i - 1]);
    let gamma0 = (hi - lo).max(spacing);
    // ±2Γ keeps the background smooth under the peak; widen only for sparse grids
    let mut idx = Vec::new();
    for wf in [2.0, 3.0, 4.0] {
        let (wlo, whi) = (e[i] - wf * gamma0, e[i] + wf * gamma0);
        idx = (lm..=rm).filter(|&k| e[k] >= wlo && e[k] <= whi).collect();
        if idx.len() >= 6 {
            break;
        }
    }
    if idx.len() < 6 {
        return Err(format!("only {} points under the peak, need 6 for a Breit-Wigner fit", idx.len()));
    }
    let ew: Vec<f64> = idx.iter().map(|&k| e[k]).collect();
    let sw: Vec<f64> = idx.iter().map(|&k| s[k]).collect();
    let b1 = bg(e[i]) * (s[rm] / s[lm]).ln() / (e[rm] / e[lm]).ln();
    let problem = BwProblem { e: &ew, s: &sw, e_ref: e[i], p: Vector6::new(e[i], gamma0, amplitude, bg(e[i]), b1, 0.0) };
    let (problem, report) = LevenbergMarquardt::new().minimize(problem);
    if !report.termination.was_successful() {
        return Err(format!("Breit-Wigner fit did not converge: {:?}", report.termination));
    }
    let mut f = problem.model();
    f.gamma = f.gamma.abs();
    if !(f.gamma > 0.0) || !(f.amplitude > 0.0) || !f.e0.is_finite() {
        return Err(format!("Breit-Wigner fit is unphysical (Γ = {}, A = {})", f.gamma, f.amplitude));
    }
    let r = problem.residuals().expect("residuals");
    f.rel_rms = (r.norm_squared() / r.len() as f64).sqrt();
    Ok(f)
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

/// Line-oriented report: one `[resonance n]` section per peak, `key value` lines.
pub fn write_resonance_report(reports: &[ResonanceReport]) -> String {
    let mut s = format!("{RESONANCE_SCHEMA}\ncount {}\n", reports.len());
    for (n, r) in reports.iter().enumerate() {
        let _ = writeln!(s, "[resonance {}]", n + 1);
        let _ = writeln!(s, "transition {} {}", r.transition.j, r.transition.jp);
        let _ = writeln!(s, "E_peak_K {:.16e}", r.e_peak);
        let _ = writeln!(s, "grid_energy_K {:.16e}", r.grid_energy);
        let _ = writeln!(s, "width_K {}", opt(r.width().map(|w| format!("{w:.16e}"))));
        let _ = writeln!(s, "fit_rel_rms {}", opt(r.fit.map(|f| format!("{:.6e}", f.rel_rms))));
        let _ = writeln!(s, "sigma_peak_A2 {:.16e}", r.sigma_peak);
        let _ = writeln!(s, "background_A2 {:.16e}", r.background);
        if let Some(f) = &r.fit {
            let _ = writeln!(s, "fit_background_A2 {:.16e}", f.background(r.grid_energy));
        }
        let _ = writeln!(s, "peak_over_background {:.6}", r.peak_over_background);
        let _ = writeln!(s, "block_J {}", opt(r.block.map(|b| b.0)));
        let _ = writeln!(s, "block_parity {}", opt(r.block.map(|b| b.1)));
        let _ = writeln!(s, "block_share {:.6}", r.block_share);
        let _ = writeln!(s, "single_block {}", r.single_block());
        let _ = writeln!(s, "dominant_L {}", opt(r.dominant_l));
        let _ = writeln!(s, "L_share {:.6}", r.l_share);
        let _ = writeln!(s, "omega_zero_excluded {}", opt(r.omega_zero_excluded()));
        if let Some(d) = &r.diagnostic {
            let _ = writeln!(s, "diagnostic {d}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::log_grid;

    fn synthetic(e0: f64, gamma: f64) -> (Vec<f64>, Vec<f64>) {
        let e = log_grid(1e-3, 10.0, 200);
        let h = 0.5 * gamma;
        let s = e.iter().map(|&x| 50.0 / x.sqrt() + 400.0 * h * h / ((x - e0).powi(2) + h * h)).collect();
        (e, s)
    }

    #[test]
    fn recovers_a_clean_breit_wigner() {
        let t = Transition::new(2, 1);
        let (e, s) = synthetic(0.3, 0.05);
        let table = ScanTable::from_series(t, &e, &s).unwrap();
        let r = find_resonances(&table, t, 0.5).unwrap();
        assert_eq!(r.len(), 1);
        let f = r[0].fit.expect("fit converges");
        assert!((f.e0 / 0.3 - 1.0).abs() < 0.02, "{f:?}");
        assert!((f.gamma / 0.05 - 1.0).abs() < 0.05, "{f:?}");
    }

    #[test]
    fn monotonic_data_has_no_peaks() {
        let t = Transition::new(2, 1);
        let e = log_grid(1e-3, 10.0, 50);
        let s: Vec<f64> = e.iter().map(|x| 1.0 / x).collect();
        assert!(find_resonances(&ScanTable::from_series(t, &e, &s).unwrap(), t, 0.5).unwrap().is_empty());
    }

    #[test]
    fn endpoint_maximum_is_not_a_peak() {
        let t = Transition::new(2, 1);
        let e = log_grid(1e-3, 1.0, 20);
        let s: Vec<f64> = e.iter().map(|x| x.sqrt()).collect();
        assert!(find_resonances(&ScanTable::from_series(t, &e, &s).unwrap(), t, 0.0).unwrap().is_empty());
    }

    #[test]
    fn shallow_bump_is_below_prominence() {
        let t = Transition::new(2, 1);
        let e = log_grid(1e-3, 10.0, 200);
        let s: Vec<f64> = e.iter().map(|&x| 10.0 + 2.0 * (-(x.ln() - 0.3f64.ln()).powi(2) * 20.0).exp()).collect();
        let table = ScanTable::from_series(t, &e, &s).unwrap();
        assert!(find_resonances(&table, t, 0.5).unwrap().is_empty());
        assert_eq!(find_resonances(&table, t, 0.1).unwrap().len(), 1);
    }
}
