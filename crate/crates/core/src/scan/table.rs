use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use super::{find_resonances_in, ScanError};
use crate::ccsolver::{cross_section, cross_section_by_partial_wave, solve_all, CollisionConfig, Transition};
use crate::potential::PotentialModel;
use crate::stereo::{
    direct_moments, helicity_transform, helicity_transform_restricted, prep_ics, PolarizationMoments, Preparation,
    StereoError, MAGIC_ANGLE_DEG,
};
use crate::units::BOHR2_TO_ANGSTROM2;

pub const SCAN_SCHEMA: &str = "# stereodyn-scan v1";

/// What each scan row records.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSettings {
    pub transitions: Vec<Transition>,
    /// Directed `m = 0` preparations (degrees) for the prepared ICS columns.
    pub prep_betas: Vec<f64>,
    /// Entrance partial wave for the restricted `s^(2)_0` column.
    pub restricted_l: Option<u32>,
    /// Local refinement factor around detected peaks.
    pub refine_factor: usize,
    /// Relative prominence for peak detection.
    pub prominence: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            transitions: vec![Transition::new(2, 1), Transition::new(2, 0)],
            prep_betas: vec![0.0, 90.0, MAGIC_ANGLE_DEG],
            restricted_l: Some(2),
            refine_factor: 5,
            prominence: 0.5,
        }
    }
}

/// One transition at one energy. Cross sections in Å².
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    pub sigma: f64,
    /// `σ` restricted to entrance partial wave `L`, index `L`.
    pub sigma_by_l: Vec<f64>,
    /// Partial `σ` of every `(J, parity)` block.
    pub blocks: Vec<(u32, i32, f64)>,
    /// `s^(k)_0`, index `k`.
    pub s_k0: Vec<f64>,
    /// `s^(2)_0` of the amplitude restricted to [`ScanSettings::restricted_l`].
    pub s20_restricted: Option<f64>,
    /// Prepared ICS per entry of [`ScanSettings::prep_betas`].
    pub prep_ics: Vec<f64>,
    pub unpolarized: f64,
}

impl TransitionRow {
    /// Block carrying the largest partial cross section, with its share.
    pub fn dominant_block(&self) -> Option<(u32, i32, f64)> {
        let best = self.blocks.iter().copied().max_by(|a, b| a.2.total_cmp(&b.2))?;
        (self.sigma > 0.0).then(|| (best.0, best.1, best.2 / self.sigma))
    }

    pub fn s20(&self) -> f64 {
        self.s_k0.get(2).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowData {
    /// Same order as [`ScanSettings::transitions`].
    pub transitions: Vec<TransitionRow>,
    /// Eigenphase sum (mod π) of every block.
    pub eigenphases: Vec<(u32, i32, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub e_col: f64,
    /// Per-energy failures are kept as messages; the scan carries on.
    pub data: Result<RowData, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub settings: ScanSettings,
    /// Number of per-L columns per transition.
    pub n_partial_waves: usize,
    pub rows: Vec<ScanRow>,
    /// Set when the scan stopped early; `rows` then holds what finished.
    pub cancelled: bool,
}

impl ScanTable {
    /// A table carrying only total cross sections (Å²) of one transition,
    /// used for synthetic data and externally computed curves.
    pub fn from_series(t: Transition, energies: &[f64], sigma: &[f64]) -> Result<Self, ScanError> {
        check_grid(energies)?;
        let rows = energies
            .iter()
            .zip(sigma)
            .map(|(&e, &s)| ScanRow {
                e_col: e,
                data: Ok(RowData {
                    transitions: vec![TransitionRow {
                        sigma: s,
                        sigma_by_l: Vec::new(),
                        blocks: Vec::new(),
                        s_k0: Vec::new(),
                        s20_restricted: None,
                        prep_ics: Vec::new(),
                        unpolarized: s,
                    }],
                    eigenphases: Vec::new(),
                }),
            })
            .collect();
        let settings = ScanSettings { transitions: vec![t], prep_betas: Vec::new(), restricted_l: None, ..Default::default() };
        Ok(Self { settings, n_partial_waves: 0, rows, cancelled: false })
    }

    pub fn transition_index(&self, t: Transition) -> Result<usize, ScanError> {
        self.settings
            .transitions
            .iter()
            .position(|&x| x == t)
            .ok_or(ScanError::UnknownTransition { j: t.j, jp: t.jp })
    }

    /// Successful rows as `(E, row)` for one transition.
    pub fn series(&self, t: Transition) -> Result<Vec<(f64, &TransitionRow)>, ScanError> {
        let i = self.transition_index(t)?;
        Ok(self.rows.iter().filter_map(|r| r.data.as_ref().ok().map(|d| (r.e_col, &d.transitions[i]))).collect())
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.data.is_err()).count()
    }
}

/// `n` log-spaced energies from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi / lo).ln() / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { hi } else { lo * (step * i as f64).exp() }).collect()
        }
    }
}

fn check_grid(energies: &[f64]) -> Result<(), ScanError> {
    if energies.is_empty() {
        return Err(ScanError::EmptyGrid);
    }
    if !(energies[0] > 0.0) {
        return Err(ScanError::NotIncreasing { index: 0 });
    }
    if let Some(i) = energies.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(ScanError::NotIncreasing { index: i + 1 });
    }
    Ok(())
}

fn transition_row(
    blocks: &[crate::ccsolver::SMatrixBlock],
    t: Transition,
    settings: &ScanSettings,
    n_l: usize,
) -> Result<TransitionRow, StereoError> {
    let sigma = cross_section(blocks, t) * BOHR2_TO_ANGSTROM2;
    let mut sigma_by_l = vec![0.0; n_l];
    for (l, s) in cross_section_by_partial_wave(blocks, t) {
        if let Some(slot) = sigma_by_l.get_mut(l as usize) {
            *slot = s * BOHR2_TO_ANGSTROM2;
        }
    }
    let partial = blocks
        .iter()
        .map(|b| (b.total_j, b.parity, cross_section(std::slice::from_ref(b), t) * BOHR2_TO_ANGSTROM2))
        .collect();
    if !(sigma > 0.0) {
        // no flux into this channel: moments undefined, prepared ICS all zero
        return Ok(TransitionRow {
            sigma,
            sigma_by_l,
            blocks: partial,
            s_k0: Vec::new(),
            s20_restricted: None,
            prep_ics: vec![0.0; settings.prep_betas.len()],
            unpolarized: 0.0,
        });
    }
    let h = helicity_transform(blocks, t)?;
    let direct = direct_moments(&h)?;
    let moments = PolarizationMoments::from_direct(t.j, h.e_col, &direct);
    let mut prep = Vec::with_capacity(settings.prep_betas.len());
    for &beta in &settings.prep_betas {
        prep.push(prep_ics(&moments, &Preparation::directed(t.j, beta, 0.0)?)? * BOHR2_TO_ANGSTROM2);
    }
    let unpolarized = prep_ics(&moments, &Preparation::unpolarized(t.j))? * BOHR2_TO_ANGSTROM2;
    let s20_restricted = match settings.restricted_l {
        Some(l) if t.j > 0 => match direct_moments(&helicity_transform_restricted(blocks, t, l)?) {
            Ok(d) => Some(d.s0[2]),
            Err(StereoError::ZeroCrossSection) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    Ok(TransitionRow {
        sigma,
        sigma_by_l,
        blocks: partial,
        s_k0: direct.s0,
        s20_restricted,
        prep_ics: prep,
        unpolarized,
    })
}

fn scan_row(cfg: &CollisionConfig, model: &PotentialModel, e: f64, settings: &ScanSettings, n_l: usize) -> ScanRow {
    let data = solve_all(&cfg.with_energy(e), model).map_err(|err| err.to_string()).and_then(|sol| {
        let eigenphases = sol.blocks.iter().map(|b| (b.total_j, b.parity, b.eigenphase_sum())).collect();
        let transitions = settings
            .transitions
            .iter()
            .map(|&t| transition_row(&sol.blocks, t, settings, n_l).map_err(|err| format!("{} -> {}: {err}", t.j, t.jp)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RowData { transitions, eigenphases })
    });
    if let Err(msg) = &data {
        log::warn!("E = {e} K: {msg}");
    }
    ScanRow { e_col: e, data }
}

pub fn energy_scan(
    cfg: &CollisionConfig,
    model: &PotentialModel,
    energies: &[f64],
    settings: &ScanSettings,
) -> Result<ScanTable, ScanError> {
    energy_scan_cancellable(cfg, model, energies, settings, &AtomicBool::new(false))
}

/// As [`energy_scan`]; energies not yet started when `cancel` is raised are
/// dropped and the table is flagged as cancelled.
pub fn energy_scan_cancellable(
    cfg: &CollisionConfig,
    model: &PotentialModel,
    energies: &[f64],
    settings: &ScanSettings,
    cancel: &AtomicBool,
) -> Result<ScanTable, ScanError> {
    check_grid(energies)?;
    if settings.transitions.is_empty() {
        return Err(ScanError::NoTransitions);
    }
    let j_max = settings.transitions.iter().map(|t| t.j).max().unwrap_or(0);
    let n_l = (cfg.j_total_max + j_max + 1) as usize;
    let rows: Vec<Option<ScanRow>> = energies
        .par_iter()
        .map(|&e| (!cancel.load(Ordering::Relaxed)).then(|| scan_row(cfg, model, e, settings, n_l)))
        .collect();
    let cancelled = rows.iter().any(Option::is_none);
    Ok(ScanTable { settings: settings.clone(), n_partial_waves: n_l, rows: rows.into_iter().flatten().collect(), cancelled })
}

/// Extra energies that shrink the spacing `factor`-fold over two intervals
/// either side of every detected peak.
pub fn refine_grid(table: &ScanTable) -> Vec<f64> {
    let factor = table.settings.refine_factor.max(1);
    let energies: Vec<f64> = table.rows.iter().map(|r| r.e_col).collect();
    let mut extra = Vec::new();
    for &t in &table.settings.transitions {
        let Ok(peaks) = find_resonances_in(table, t, table.settings.prominence, false) else { continue };
        for p in peaks {
            let Some(i) = energies.iter().position(|&e| e == p.grid_energy) else { continue };
            for w in energies[i.saturating_sub(2)..(i + 3).min(energies.len())].windows(2) {
                let ratio = (w[1] / w[0]).powf(1.0 / factor as f64);
                extra.extend((1..factor).map(|m| w[0] * ratio.powi(m as i32)));
            }
        }
    }
    extra.sort_by(f64::total_cmp);
    extra.dedup();
    extra.retain(|e| !energies.contains(e));
    extra
}

/// Scan, then refine around detected peaks and merge.
pub fn scan_with_refinement(
    cfg: &CollisionConfig,
    model: &PotentialModel,
    energies: &[f64],
    settings: &ScanSettings,
    cancel: &AtomicBool,
) -> Result<ScanTable, ScanError> {
    let mut table = energy_scan_cancellable(cfg, model, energies, settings, cancel)?;
    if table.cancelled || settings.refine_factor <= 1 {
        return Ok(table);
    }
    let extra = refine_grid(&table);
    if extra.is_empty() {
        return Ok(table);
    }
    log::info!("refining with {} extra energies", extra.len());
    let more = energy_scan_cancellable(cfg, model, &extra, settings, cancel)?;
    table.cancelled = more.cancelled;
    table.rows.extend(more.rows);
    table.rows.sort_by(|a, b| a.e_col.total_cmp(&b.e_col));
    Ok(table)
}

fn g(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(table: &ScanTable) -> String {
    let mut cols = vec!["E_col_K".to_string(), "status".to_string()];
    for t in &table.settings.transitions {
        let tag = format!("{}to{}", t.j, t.jp);
        cols.push(format!("sigma_{tag}_A2"));
        cols.extend((0..table.n_partial_waves).map(|l| format!("sigma_{tag}_L{l}_A2")));
        cols.extend((2..=2 * t.j).step_by(2).map(|k| format!("s{k}0_{tag}")));
        if let Some(l) = table.settings.restricted_l {
            cols.push(format!("s20_L{l}_{tag}"));
        }
        cols.extend(table.settings.prep_betas.iter().map(|b| format!("prep_{tag}_beta{b:.4}_A2")));
        cols.push(format!("prep_{tag}_unpolarized_A2"));
        cols.extend([format!("dominant_J_{tag}"), format!("dominant_parity_{tag}"), format!("dominant_share_{tag}")]);
    }
    cols.push("message".into());
    cols.join(",")
}

/// One CSV line per row; failed rows keep the energy, leave values empty and
/// carry the message.
pub fn write_scan_csv(table: &ScanTable) -> String {
    let mut s = format!("{SCAN_SCHEMA}\n{}\n", header(table));
    let width = header(table).split(',').count();
    for row in &table.rows {
        let mut f = vec![g(row.e_col)];
        match &row.data {
            Ok(d) => {
                f.push("ok".into());
                for (t, tr) in table.settings.transitions.iter().zip(&d.transitions) {
                    f.push(g(tr.sigma));
                    f.extend((0..table.n_partial_waves).map(|l| g(tr.sigma_by_l.get(l).copied().unwrap_or(0.0))));
                    f.extend((2..=2 * t.j as usize).step_by(2).map(|k| tr.s_k0.get(k).copied().map(g).unwrap_or_default()));
                    if table.settings.restricted_l.is_some() {
                        f.push(tr.s20_restricted.map(g).unwrap_or_default());
                    }
                    f.extend(tr.prep_ics.iter().map(|&v| g(v)));
                    f.push(g(tr.unpolarized));
                    match tr.dominant_block() {
                        Some((jj, p, share)) => f.extend([jj.to_string(), p.to_string(), g(share)]),
                        None => f.extend([String::new(), String::new(), String::new()]),
                    }
                }
                f.push(String::new());
            }
            Err(msg) => {
                f.push("failed".into());
                f.resize(width - 1, String::new());
                f.push(msg.replace([',', '\n'], ";"));
            }
        }
        let _ = writeln!(s, "{}", f.join(","));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_hits_both_ends() {
        let g = log_grid(1e-3, 10.0, 200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[199], 10.0);
        let r = g[1] / g[0];
        assert!(g.windows(2).all(|w| (w[1] / w[0] - r).abs() < 1e-12));
    }

    #[test]
    fn grid_must_increase() {
        assert_eq!(check_grid(&[]), Err(ScanError::EmptyGrid));
        assert_eq!(check_grid(&[0.1, 0.2, 0.2]), Err(ScanError::NotIncreasing { index: 2 }));
        assert_eq!(check_grid(&[-1.0, 0.2]), Err(ScanError::NotIncreasing { index: 0 }));
    }

    #[test]
    fn zero_potential_rows_vanish() {
        let cfg = CollisionConfig { j_total_max: 3, ..Default::default() };
        let settings = ScanSettings { transitions: vec![Transition::new(2, 1)], ..Default::default() };
        let table = energy_scan(&cfg, &PotentialModel::zero(), &[0.1, 1.0], &settings).unwrap();
        assert_eq!(table.failures(), 0);
        let (_, row) = table.series(Transition::new(2, 1)).unwrap()[0];
        assert_eq!(row.sigma, 0.0);
        assert!(row.s_k0.is_empty() && row.dominant_block().is_none());
        let csv = write_scan_csv(&table);
        let line = csv.lines().nth(2).unwrap();
        assert_eq!(line.split(',').count(), csv.lines().nth(1).unwrap().split(',').count());
    }
}
