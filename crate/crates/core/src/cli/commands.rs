use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use super::config::RunConfig;
use super::{CliError, Command};
use crate::ccsolver::{read_smatrix_file, solve_all, write_smatrix_file, SMatrixBlock, SMatrixSet, Transition};
use crate::potential::{surrogate_calibration, write_model, CalibrationError, ResonanceTarget};
use crate::scan::{
    find_resonances, mechanism_summary, scan_with_refinement, wigner_slope, write_resonance_report, write_scan_csv,
    MechanismDigest, ScanSettings,
};
use crate::stereo::{
    amplitudes, helicity_transform, moment_index, pddcs, polarization_moments, portrait, prep_dcs, read_moments_csv,
    write_dcs_csv, write_moments_csv, write_portrait_csv, DcsRow, MomentRow, PolarizationMoments, StereoError,
    ThetaGrid,
};
use crate::units::BOHR2_TO_ANGSTROM2;

use super::config::ObservableSpec;

/// Hermiticity defect above which a moment set is reported as suspect.
const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Whether a run finished everything it set out to do.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Energies or items that failed, and whether the run was cancelled.
    pub failures: usize,
    pub cancelled: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures > 0 || self.cancelled {
            1
        } else {
            0
        }
    }
}

fn write(path: PathBuf, text: &str, outcome: &mut Outcome) -> Result<(), CliError> {
    std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    log::info!("wrote {}", path.display());
    outcome.files.push(path);
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })
}

pub(super) fn plan(cfg: &RunConfig, command: Command) -> String {
    let what = match command {
        Command::Scan => format!("scan: {} energies, then refinement; writes scan.csv, resonances.txt", cfg.scan.points),
        Command::Smatrix => format!("smatrix: {} energies; writes smatrix_<E>K.txt", cfg.scan.energies.len()),
        Command::Observables if cfg.observables.smatrix_files.is_empty() => {
            format!("observables: solve {} energies; writes moments.csv, dcs.csv", cfg.scan.energies.len())
        }
        Command::Observables => format!(
            "observables: {} S-matrix files; writes moments.csv, dcs.csv",
            cfg.observables.smatrix_files.len()
        ),
        Command::Portrait => format!(
            "portrait: from {}; writes portrait_<j>to<jp>.csv",
            cfg.portrait.moments.clone().unwrap_or_else(|| cfg.output.join("moments.csv")).display()
        ),
        Command::Calibrate => format!(
            "calibrate: {} x {} surrogate grid; writes calibration.txt, calibrated.pot",
            cfg.calibration.epsilons.len(),
            cfg.calibration.v2_amplitudes.len()
        ),
    };
    format!("{}plan          {what}\n", cfg.describe())
}

pub(super) fn dispatch(cfg: &RunConfig, command: Command, cancel: &AtomicBool) -> Result<Outcome, CliError> {
    ensure_dir(&cfg.output)?;
    match command {
        Command::Scan => cmd_scan(cfg, cancel),
        Command::Smatrix => cmd_smatrix(cfg, cancel),
        Command::Observables => cmd_observables(cfg, cancel),
        Command::Portrait => cmd_portrait(cfg),
        Command::Calibrate => cmd_calibrate(cfg),
    }
}

fn scan_settings(cfg: &RunConfig) -> ScanSettings {
    let mut betas: Vec<f64> = Vec::new();
    for p in &cfg.observables.preparations {
        if let super::PrepSpec::Directed { beta, .. } = p {
            if !betas.contains(beta) {
                betas.push(*beta);
            }
        }
    }
    ScanSettings {
        transitions: cfg.observables.transitions.clone(),
        prep_betas: betas,
        restricted_l: cfg.observables.restricted_l,
        refine_factor: cfg.scan.refine_factor,
        prominence: cfg.scan.prominence,
    }
}

fn write_digest(s: &mut String, n: usize, d: &MechanismDigest) {
    let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.6e}"));
    let _ = writeln!(s, "[mechanism {n}]");
    let _ = writeln!(s, "E_peak_K {:.16e}", d.e_peak);
    let _ = writeln!(s, "s20_below {:.6e} {:.6e}", d.s20_below.0, d.s20_below.1);
    let _ = writeln!(s, "s20_at {:.6e} {:.6e}", d.s20_at.0, d.s20_at.1);
    let _ = writeln!(s, "s20_above {:.6e} {:.6e}", d.s20_above.0, d.s20_above.1);
    let _ = writeln!(s, "s20_restricted {}", opt(d.s20_restricted));
    let _ = writeln!(s, "suppression_beta0 {}", opt(d.suppression));
    let _ = writeln!(s, "control_suppression_beta0 {}", opt(d.control_suppression));
    let _ = writeln!(s, "flank_ratio_unpolarized {:.6}", d.flank_ratio_unpolarized);
    let _ = writeln!(s, "flank_ratio_beta0 {}", opt(d.flank_ratio_beta0));
    let _ = writeln!(s, "s20_switches {}", d.s20_switches);
}

fn cmd_scan(cfg: &RunConfig, cancel: &AtomicBool) -> Result<Outcome, CliError> {
    let model = cfg.load_model()?;
    let settings = scan_settings(cfg);
    let table = scan_with_refinement(&cfg.collision, &model, &cfg.scan.grid(), &settings, cancel)?;
    let mut outcome = Outcome { failures: table.failures(), cancelled: table.cancelled, ..Outcome::default() };
    write(cfg.output.join("scan.csv"), &write_scan_csv(&table), &mut outcome)?;
    if table.cancelled {
        log::warn!("cancelled after {} rows; resonance analysis skipped", table.rows.len());
        return Ok(outcome);
    }
    let mut reports = Vec::new();
    let mut slopes = String::new();
    for &t in &settings.transitions {
        reports.extend(find_resonances(&table, t, settings.prominence)?);
        match wigner_slope(&table, t, cfg.scan.threshold_window) {
            Ok(s) => {
                let _ = writeln!(slopes, "threshold_slope_{}to{} {s:.6}", t.j, t.jp);
            }
            Err(e) => log::warn!("threshold slope {} -> {}: {e}", t.j, t.jp),
        }
    }
    let mut text = write_resonance_report(&reports);
    let _ = writeln!(text, "[threshold]");
    let _ = writeln!(text, "window_K {:.6e} {:.6e}", cfg.scan.threshold_window.0, cfg.scan.threshold_window.1);
    text.push_str(&slopes);
    if !settings.prep_betas.is_empty() {
        for (n, d) in mechanism_summary(&table, &reports)?.iter().enumerate() {
            write_digest(&mut text, n + 1, d);
        }
    }
    write(cfg.output.join("resonances.txt"), &text, &mut outcome)?;
    if outcome.failures > 0 {
        log::warn!("{} of {} energies failed; see the message column of scan.csv", outcome.failures, table.rows.len());
    }
    Ok(outcome)
}

fn smatrix_set(cfg: &RunConfig, blocks: Vec<SMatrixBlock>) -> SMatrixSet {
    SMatrixSet { mu: cfg.collision.mu, e_initial: cfg.collision.rotor_energy(cfg.collision.j_initial), blocks }
}

fn cmd_smatrix(cfg: &RunConfig, cancel: &AtomicBool) -> Result<Outcome, CliError> {
    let model = cfg.load_model()?;
    let mut outcome = Outcome::default();
    for &e in &cfg.scan.energies {
        if cancel.load(Ordering::Relaxed) {
            outcome.cancelled = true;
            break;
        }
        match solve_all(&cfg.collision.with_energy(e), &model) {
            Ok(sol) => {
                let path = cfg.output.join(format!("smatrix_{e}K.txt"));
                write_smatrix_file(&path, &smatrix_set(cfg, sol.blocks))?;
                log::info!("wrote {}", path.display());
                outcome.files.push(path);
            }
            Err(err) => {
                log::error!("E = {e} K: {err}");
                outcome.failures += 1;
            }
        }
    }
    Ok(outcome)
}

/// Moments and DCS rows for one energy's blocks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Observables {
    pub moments: Vec<MomentRow>,
    pub dcs: Vec<DcsRow>,
    /// Largest hermiticity defect over the transitions.
    pub hermiticity: f64,
}

/// The observable pipeline shared by in-memory runs and S-matrix files.
/// Transitions with no flux get DCS rows but no moments.
pub fn observables_for(blocks: &[SMatrixBlock], spec: &ObservableSpec) -> Result<Observables, StereoError> {
    let Some(e_col) = blocks.first().map(|b| b.e_col) else { return Err(StereoError::NoBlocks) };
    let grid = ThetaGrid::gauss_legendre(spec.n_theta)?;
    let mut out = Observables::default();
    for &t in &spec.transitions {
        let h = helicity_transform(blocks, t)?;
        let mset = pddcs(&amplitudes(&h, &grid)?);
        out.hermiticity = out.hermiticity.max(mset.hermiticity_defect());
        let mut columns = Vec::new();
        for p in &spec.preparations {
            let prep = p.build(t.j);
            let d = prep_dcs(&mset, &prep)?;
            if d.clamped > 0 {
                log::debug!("{}: clamped {} round-off negatives", prep.label, d.clamped);
            }
            columns.push((prep.label, d.values));
        }
        for (label, values) in columns {
            out.dcs.extend(grid.degrees().zip(values).map(|(theta_deg, v)| DcsRow {
                e_col,
                theta_deg,
                value: v * BOHR2_TO_ANGSTROM2,
                preparation: format!("{}to{}:{label}", t.j, t.jp),
            }));
        }
        match polarization_moments(&mset) {
            Ok(pm) => out.moments.extend(moment_rows(t, &pm)),
            Err(StereoError::ZeroCrossSection) => log::warn!("E = {e_col} K, {} -> {}: no flux, moments skipped", t.j, t.jp),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn moment_rows(t: Transition, pm: &PolarizationMoments) -> Vec<MomentRow> {
    let mut rows = Vec::new();
    for k in 0..=2 * pm.j {
        for q in -(k as i32)..=k as i32 {
            let value = pm.values()[moment_index(k, q)];
            rows.push(MomentRow { e_col: pm.e_col, j: t.j, jp: t.jp, k, q, value });
        }
    }
    rows
}

fn cmd_observables(cfg: &RunConfig, cancel: &AtomicBool) -> Result<Outcome, CliError> {
    let mut sets: Vec<(String, Result<Vec<SMatrixBlock>, CliError>)> = Vec::new();
    if cfg.observables.smatrix_files.is_empty() {
        let model = cfg.load_model()?;
        for &e in &cfg.scan.energies {
            if cancel.load(Ordering::Relaxed) {
                break;
            }
            let r = solve_all(&cfg.collision.with_energy(e), &model).map(|s| s.blocks).map_err(CliError::from);
            sets.push((format!("E = {e} K"), r));
        }
    } else {
        for f in &cfg.observables.smatrix_files {
            let r = read_smatrix_file(f).map(|s| s.blocks).map_err(CliError::from);
            sets.push((f.display().to_string(), r));
        }
    }
    let n_requested = if cfg.observables.smatrix_files.is_empty() { cfg.scan.energies.len() } else { sets.len() };
    let mut outcome = Outcome { cancelled: sets.len() < n_requested, ..Outcome::default() };
    let mut all = Observables::default();
    for (name, blocks) in sets {
        match blocks.and_then(|b| observables_for(&b, &cfg.observables).map_err(CliError::from)) {
            Ok(o) => {
                if o.hermiticity > HERMITICITY_TOLERANCE {
                    log::error!("{name}: moment hermiticity defect {:.3e}", o.hermiticity);
                    outcome.failures += 1;
                }
                all.hermiticity = all.hermiticity.max(o.hermiticity);
                all.moments.extend(o.moments);
                all.dcs.extend(o.dcs);
            }
            Err(e) => {
                log::error!("{name}: {e}");
                outcome.failures += 1;
            }
        }
    }
    log::info!("largest hermiticity defect {:.3e}", all.hermiticity);
    write(cfg.output.join("moments.csv"), &write_moments_csv(&all.moments), &mut outcome)?;
    write(cfg.output.join("dcs.csv"), &write_dcs_csv(&all.dcs), &mut outcome)?;
    Ok(outcome)
}

/// Groups a moments table into one moment set per `(transition, energy)`.
fn group_moments(rows: &[MomentRow]) -> Result<BTreeMap<(u32, u32), Vec<PolarizationMoments>>, StereoError> {
    let mut sets: BTreeMap<(u32, u32), Vec<(f64, Vec<Option<num_complex::Complex64>>)>> = BTreeMap::new();
    for r in rows {
        let n = ((2 * r.j + 1) * (2 * r.j + 1)) as usize;
        let list = sets.entry((r.j, r.jp)).or_default();
        if list.last().map_or(true, |(e, _)| *e != r.e_col) {
            list.push((r.e_col, vec![None; n]));
        }
        let slot = list.last_mut().expect("just pushed");
        if r.k > 2 * r.j || r.q.unsigned_abs() > r.k {
            return Err(StereoError::RankTooHigh { k: r.k, j: r.j });
        }
        slot.1[moment_index(r.k, r.q)] = Some(r.value);
    }
    let mut out = BTreeMap::new();
    for ((j, jp), list) in sets {
        let mut v = Vec::new();
        for (e, values) in list {
            let Some(values) = values.into_iter().collect::<Option<Vec<_>>>() else {
                return Err(StereoError::Parse { line: 0, message: format!("incomplete moment set for {j} -> {jp} at {e} K") });
            };
            v.push(PolarizationMoments::from_values(j, e, f64::NAN, values).expect("length matches j"));
        }
        out.insert((j, jp), v);
    }
    Ok(out)
}

fn cmd_portrait(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let path = cfg.portrait.moments.clone().unwrap_or_else(|| cfg.output.join("moments.csv"));
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let rows = read_moments_csv(&text).map_err(|e| match e {
        StereoError::Parse { line, message } => CliError::Config { path: path.clone(), line: Some(line), message },
        e => CliError::Stereo(e),
    })?;
    let mut outcome = Outcome::default();
    for ((j, jp), sets) in group_moments(&rows)? {
        let mut grids = Vec::new();
        for pm in &sets {
            let p = portrait(pm, cfg.portrait.n_theta, cfg.portrait.n_phi)?;
            if p.clamped > 0 {
                log::warn!("{j} -> {jp} at {} K: {} slightly negative densities clamped", pm.e_col, p.clamped);
            }
            grids.push((pm.e_col, p));
        }
        let refs: Vec<(f64, &_)> = grids.iter().map(|(e, p)| (*e, p)).collect();
        write(cfg.output.join(format!("portrait_{j}to{jp}.csv")), &write_portrait_csv(&refs), &mut outcome)?;
    }
    Ok(outcome)
}

fn cmd_calibrate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let target = ResonanceTarget::default();
    let mut outcome = Outcome::default();
    let report = match surrogate_calibration(&cfg.collision, &cfg.calibration, &target) {
        Ok(r) => r,
        Err(CalibrationError::Exhausted { report, .. }) => {
            log::error!("no candidate met the target; writing the report only");
            outcome.failures = 1;
            write(cfg.output.join("calibration.txt"), &report.to_text(), &mut outcome)?;
            return Ok(outcome);
        }
        Err(e) => return Err(e.into()),
    };
    write(cfg.output.join("calibration.txt"), &report.to_text(), &mut outcome)?;
    write(cfg.output.join("calibrated.pot"), &write_model(&report.best_model()?), &mut outcome)?;
    Ok(outcome)
}
