//! Grid search for a surrogate model whose Δj = −1 quenching cross section
//! shows one isolated sub-kelvin shape resonance carried by a single
//! `(J, parity)` block.

use std::fmt::Write as _;

use thiserror::Error;

use super::{LambdaTerm, PotentialError, PotentialModel, RadialForm};
use crate::ccsolver::{cross_section, cross_section_by_partial_wave, solve_all, CcError, CollisionConfig, Transition};

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("search exhausted without a candidate meeting the target; best: {}", .best.summary())]
    Exhausted { best: Box<CalibrationCandidate>, report: Box<CalibrationReport> },
    #[error("empty search grid")]
    EmptyGrid,
    #[error(transparent)]
    Solver(#[from] CcError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// What the calibrated resonance must look like.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceTarget {
    pub transition: Transition,
    /// Peaks are searched in this window (K).
    pub window: (f64, f64),
    /// Minimum share of the peak carried by one block.
    pub min_block_share: f64,
    /// Required dominant entrance partial wave, if any.
    pub partial_wave: Option<u32>,
    /// Require `I·(−1)^J = −1` for the responsible block.
    pub omega_free: bool,
    /// Points of the log-spaced search grid.
    pub points: usize,
    /// A point is a peak if it exceeds its neighbours three points away by this factor.
    pub contrast: f64,
    /// Two energies (K) at the bottom of the intended scan where the
    /// quenching cross section must already follow `E^{-1/2}`.
    pub threshold_energies: Option<(f64, f64)>,
    /// Allowed deviation of the local log-log slope from −1/2.
    pub slope_tolerance: f64,
}

impl Default for ResonanceTarget {
    fn default() -> Self {
        Self {
            transition: Transition::new(2, 1),
            window: (0.02, 1.0),
            min_block_share: 0.8,
            partial_wave: Some(2),
            omega_free: true,
            points: 48,
            contrast: 1.5,
            threshold_energies: Some((1e-3, 2e-3)),
            slope_tolerance: 0.03,
        }
    }
}

/// Surrogate family: `v_0` Lennard-Jones, `v_1` and `v_2` short-range exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub epsilons: Vec<f64>,
    pub v2_amplitudes: Vec<f64>,
    pub sigma: f64,
    pub v1_amplitude: f64,
    pub exponent: f64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            epsilons: vec![38.0, 38.5, 39.0, 39.5, 40.0, 41.0],
            v2_amplitudes: vec![-0.9e5, -1.2e5, -1.5e5],
            sigma: 5.8,
            v1_amplitude: 3.0e4,
            exponent: 1.1,
        }
    }
}

impl SearchGrid {
    pub fn model(&self, epsilon: f64, v2_amplitude: f64) -> Result<PotentialModel, PotentialError> {
        surrogate_model(epsilon, self.sigma, self.v1_amplitude, v2_amplitude, self.exponent)
    }
}

/// The surrogate family used by the calibration.
pub fn surrogate_model(
    epsilon: f64,
    sigma: f64,
    v1_amplitude: f64,
    v2_amplitude: f64,
    exponent: f64,
) -> Result<PotentialModel, PotentialError> {
    PotentialModel::new(
        "hd_h2_surrogate",
        true,
        vec![
            LambdaTerm { lambda: 0, radial: RadialForm::LennardJones { epsilon, sigma } },
            LambdaTerm {
                lambda: 1,
                radial: RadialForm::ExpDispersion { amplitude: v1_amplitude, exponent, c6: 0.0 },
            },
            LambdaTerm {
                lambda: 2,
                radial: RadialForm::ExpDispersion { amplitude: v2_amplitude, exponent, c6: 0.0 },
            },
        ],
    )
}

/// Largest peak found for a candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSummary {
    pub energy: f64,
    pub total_j: u32,
    pub parity: i32,
    pub block_share: f64,
    pub partial_wave: u32,
    pub partial_wave_share: f64,
    /// Peak height over the mean of the two neighbours used for detection.
    pub contrast: f64,
}

impl PeakSummary {
    pub fn omega_free(&self) -> bool {
        let sign = if self.total_j % 2 == 0 { 1 } else { -1 };
        self.parity * sign == -1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCandidate {
    pub epsilon: f64,
    pub v2_amplitude: f64,
    pub peaks: Vec<PeakSummary>,
    /// Local log-log slope of the quenching cross section at the threshold energies.
    pub threshold_slope: Option<f64>,
    pub passes: bool,
}

impl CalibrationCandidate {
    pub fn summary(&self) -> String {
        let mut s = format!("ε = {} K, A2 = {} K: {} peak(s)", self.epsilon, self.v2_amplitude, self.peaks.len());
        if let Some(slope) = self.threshold_slope {
            let _ = write!(s, ", threshold slope {slope:.3}");
        }
        for p in &self.peaks {
            let _ = write!(
                s,
                "; {:.4} K in J = {}{} ({:.0}%), L = {} ({:.0}%), contrast {:.2}",
                p.energy,
                p.total_j,
                if p.parity > 0 { "+" } else { "-" },
                100.0 * p.block_share,
                p.partial_wave,
                100.0 * p.partial_wave_share,
                p.contrast
            );
        }
        s
    }

    fn score(&self, target: &ResonanceTarget) -> (bool, usize, f64) {
        let contrast = self.peaks.first().map_or(f64::NEG_INFINITY, |p| p.contrast);
        let criteria = self.peaks.first().map_or(0, |p| criteria_met(p, target))
            + usize::from(self.peaks.len() == 1)
            + usize::from(slope_ok(self.threshold_slope, target));
        (self.passes, criteria, contrast)
    }
}

fn slope_ok(slope: Option<f64>, target: &ResonanceTarget) -> bool {
    match (target.threshold_energies, slope) {
        (None, _) => true,
        (Some(_), Some(s)) => (s + 0.5).abs() <= target.slope_tolerance,
        (Some(_), None) => false,
    }
}

fn criteria_met(p: &PeakSummary, target: &ResonanceTarget) -> usize {
    usize::from(p.block_share >= target.min_block_share)
        + usize::from(target.partial_wave.map_or(true, |l| p.partial_wave == l))
        + usize::from(!target.omega_free || p.omega_free())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub target: ResonanceTarget,
    pub grid: SearchGrid,
    pub candidates: Vec<CalibrationCandidate>,
    /// Index of the selected candidate.
    pub best: usize,
}

impl CalibrationReport {
    pub fn best_candidate(&self) -> &CalibrationCandidate {
        &self.candidates[self.best]
    }

    pub fn best_model(&self) -> Result<PotentialModel, PotentialError> {
        let c = self.best_candidate();
        self.grid.model(c.epsilon, c.v2_amplitude)
    }

    pub fn to_text(&self) -> String {
        let t = &self.target;
        let g = &self.grid;
        let mut s = String::new();
        let _ = writeln!(s, "# stereodyn-calibration v1");
        let _ = writeln!(s, "transition {} -> {}", t.transition.j, t.transition.jp);
        let _ = writeln!(s, "window_K {} {}", t.window.0, t.window.1);
        let _ = writeln!(s, "min_block_share {}", t.min_block_share);
        if let Some(l) = t.partial_wave {
            let _ = writeln!(s, "partial_wave {l}");
        }
        let _ = writeln!(s, "omega_free {}", t.omega_free);
        if let Some((e1, e2)) = t.threshold_energies {
            let _ = writeln!(s, "threshold_K {e1} {e2} slope_tolerance {}", t.slope_tolerance);
        }
        let _ = writeln!(s, "sigma_bohr {}", g.sigma);
        let _ = writeln!(s, "v1_amplitude_K {}", g.v1_amplitude);
        let _ = writeln!(s, "exponent_per_bohr {}", g.exponent);
        for (i, c) in self.candidates.iter().enumerate() {
            let mark = if i == self.best { '*' } else if c.passes { '+' } else { ' ' };
            let _ = writeln!(s, "{mark} {}", c.summary());
        }
        s
    }
}

/// Evaluates every grid point and picks the passing candidate with the most
/// prominent peak.
pub fn surrogate_calibration(
    cfg: &CollisionConfig,
    grid: &SearchGrid,
    target: &ResonanceTarget,
) -> Result<CalibrationReport, CalibrationError> {
    if grid.epsilons.is_empty() || grid.v2_amplitudes.is_empty() || target.points < 7 {
        return Err(CalibrationError::EmptyGrid);
    }
    let mut candidates = Vec::new();
    for &epsilon in &grid.epsilons {
        for &a2 in &grid.v2_amplitudes {
            let model = grid.model(epsilon, a2)?;
            let peaks = locate_peaks(cfg, &model, target)?;
            let threshold_slope = match target.threshold_energies {
                Some((e1, e2)) => {
                    let s1 = cross_section(&solve_all(&cfg.with_energy(e1), &model)?.blocks, target.transition);
                    let s2 = cross_section(&solve_all(&cfg.with_energy(e2), &model)?.blocks, target.transition);
                    Some((s2 / s1).ln() / (e2 / e1).ln())
                }
                None => None,
            };
            let passes = peaks.len() == 1
                && slope_ok(threshold_slope, target)
                && criteria_met(&peaks[0], target) == 3
                && peaks[0].energy >= target.window.0
                && peaks[0].energy <= target.window.1;
            let c = CalibrationCandidate { epsilon, v2_amplitude: a2, peaks, threshold_slope, passes };
            log::info!("calibration: {}{}", c.summary(), if passes { " [pass]" } else { "" });
            candidates.push(c);
        }
    }
    let best = (0..candidates.len())
        .max_by(|&a, &b| {
            candidates[a]
                .score(target)
                .partial_cmp(&candidates[b].score(target))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("grid is non-empty");
    let report = CalibrationReport { target: target.clone(), grid: grid.clone(), candidates, best };
    if !report.candidates[best].passes {
        return Err(CalibrationError::Exhausted {
            best: Box::new(report.candidates[best].clone()),
            report: Box::new(report),
        });
    }
    Ok(report)
}

/// Peaks of the target transition on a log grid spanning the window, ordered by energy.
fn locate_peaks(
    cfg: &CollisionConfig,
    model: &PotentialModel,
    target: &ResonanceTarget,
) -> Result<Vec<PeakSummary>, CalibrationError> {
    let (lo, hi) = target.window;
    let n = target.points;
    // three extra points on each side so window edges can host a peak
    let step = (hi / lo).ln() / (n - 1) as f64;
    let energies: Vec<f64> = (-3..(n as i64 + 3)).map(|i| lo * (step * i as f64).exp()).collect();
    let mut sigma = Vec::with_capacity(energies.len());
    let mut solutions = Vec::with_capacity(energies.len());
    for &e in &energies {
        let sol = solve_all(&cfg.with_energy(e), model)?;
        sigma.push(cross_section(&sol.blocks, target.transition));
        solutions.push(sol);
    }
    let mut peaks = Vec::new();
    for i in 3..energies.len() - 3 {
        let s = sigma[i];
        if !(s > sigma[i - 1] && s >= sigma[i + 1]) {
            continue;
        }
        let contrast = s / (0.5 * (sigma[i - 3] + sigma[i + 3]));
        if contrast < target.contrast {
            continue;
        }
        let blocks = &solutions[i].blocks;
        let mut best = (0, 1, 0.0);
        for b in blocks {
            let part = cross_section(std::slice::from_ref(b), target.transition);
            if part > best.2 {
                best = (b.total_j, b.parity, part);
            }
        }
        let block = blocks
            .iter()
            .find(|b| b.total_j == best.0 && b.parity == best.1)
            .expect("dominant block exists");
        let by_l = cross_section_by_partial_wave(std::slice::from_ref(block), target.transition);
        let (l, l_sigma) = by_l.iter().copied().fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        peaks.push(PeakSummary {
            energy: energies[i],
            total_j: best.0,
            parity: best.1,
            block_share: best.2 / s,
            partial_wave: l,
            partial_wave_share: if best.2 > 0.0 { l_sigma / best.2 } else { 0.0 },
            contrast,
        });
    }
    Ok(peaks)
}
