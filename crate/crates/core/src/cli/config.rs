//! Run configuration: one INI-style file with `[collision]`, `[potential]`,
//! `[scan]`, `[observables]`, `[portrait]`, `[calibrate]` and `[run]` sections.
//! Relative paths resolve against the directory of the config file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::CliError;
use crate::ccsolver::{CollisionConfig, Transition};
use crate::ini::{Document, ParseError, Section};
use crate::potential::{load_model, PotentialModel, SearchGrid};
use crate::scan::log_grid;
use crate::stereo::{Preparation, MAGIC_ANGLE_DEG};

/// Where the interaction comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    File(PathBuf),
    /// No interaction at all; every S block is the identity.
    Zero,
}

/// A preparation as written in the config: directed `m = 0` at `(β, α)` in
/// degrees, or unpolarized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrepSpec {
    Directed { beta: f64, alpha: f64 },
    Unpolarized,
}

impl PrepSpec {
    pub fn label(&self) -> String {
        match self {
            PrepSpec::Directed { beta, alpha } if *beta == MAGIC_ANGLE_DEG => format!("magic_alpha{alpha}"),
            PrepSpec::Directed { beta, alpha } => format!("beta{beta}_alpha{alpha}"),
            PrepSpec::Unpolarized => "unpolarized".into(),
        }
    }

    pub fn build(&self, j: u32) -> Preparation {
        match *self {
            PrepSpec::Directed { beta, alpha } => {
                let mut p = Preparation::directed(j, beta, alpha).expect("angles validated at parse time");
                p.label = self.label();
                p
            }
            PrepSpec::Unpolarized => Preparation::unpolarized(j),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub points: usize,
    pub refine_factor: usize,
    pub prominence: f64,
    /// Energies for `smatrix` runs (K).
    pub energies: Vec<f64>,
    /// Bottom-of-scan window (K) for the threshold-law fit.
    pub threshold_window: (f64, f64),
}

impl ScanSpec {
    pub fn grid(&self) -> Vec<f64> {
        log_grid(self.e_min, self.e_max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    pub transitions: Vec<Transition>,
    /// Gauss–Legendre nodes in `cos θ`.
    pub n_theta: usize,
    pub preparations: Vec<PrepSpec>,
    pub restricted_l: Option<u32>,
    /// S-matrix files to analyse; empty means those written by `smatrix` in the output directory.
    pub smatrix_files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Moments table to read; `None` means `moments.csv` in the output directory.
    pub moments: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub path: PathBuf,
    pub collision: CollisionConfig,
    pub model: ModelSource,
    pub scan: ScanSpec,
    pub observables: ObservableSpec,
    pub portrait: PortraitSpec,
    pub calibration: SearchGrid,
    pub output: PathBuf,
    /// 0 means one worker per core.
    pub workers: usize,
    /// Seed for synthetic inputs only.
    pub seed: u64,
}

const SECTIONS: [&str; 7] = ["collision", "potential", "scan", "observables", "portrait", "calibrate", "run"];

fn err(path: &Path, e: ParseError) -> CliError {
    CliError::Config { path: path.to_path_buf(), line: Some(e.line), message: e.message }
}

fn list<T: FromStr>(s: &Section, key: &str) -> Result<Option<Vec<T>>, ParseError> {
    s.parse_list(key)
}

fn parse_transition(entry: &str, line: usize) -> Result<Transition, ParseError> {
    let bad = || ParseError { line, message: format!("transition `{entry}` is not of the form `j->jp`") };
    let (a, b) = entry.split_once("->").ok_or_else(bad)?;
    Ok(Transition::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_prep(entry: &str, line: usize) -> Result<PrepSpec, ParseError> {
    let entry = entry.trim();
    if entry == "unpolarized" {
        return Ok(PrepSpec::Unpolarized);
    }
    let bad = |m: String| ParseError { line, message: m };
    let (b, a) = entry.split_once(':').unwrap_or((entry, "0"));
    let beta = match b.trim() {
        "magic" => MAGIC_ANGLE_DEG,
        v => v.parse().map_err(|_| bad(format!("preparation `{entry}`: cannot parse β")))?,
    };
    let alpha: f64 = a.trim().parse().map_err(|_| bad(format!("preparation `{entry}`: cannot parse α")))?;
    if !(0.0..=180.0).contains(&beta) {
        return Err(bad(format!("preparation `{entry}`: β must lie in [0, 180]")));
    }
    if !(0.0..360.0).contains(&alpha) {
        return Err(bad(format!("preparation `{entry}`: α must lie in [0, 360)")));
    }
    Ok(PrepSpec::Directed { beta, alpha })
}

fn split_items(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            line: None,
            message: format!("cannot read config: {e}"),
        })?;
        Self::parse(&text, path)
    }

    /// Parses `text` as if read from `path` (used to resolve relative paths).
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let doc = Document::parse(text).map_err(|e| err(path, e))?;
        for s in &doc.sections {
            if !SECTIONS.contains(&s.name.as_str()) {
                return Err(err(path, ParseError { line: s.line, message: format!("unknown section [{}]", s.name) }));
            }
            if let Some((line, raw)) = s.data.first() {
                return Err(err(path, ParseError { line: *line, message: format!("expected `key = value`, found `{raw}`") }));
            }
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let base = base.canonicalize().unwrap_or(base);
        let resolve = |p: &str| {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        let empty = Section { name: String::new(), line: 1, entries: Vec::new(), data: Vec::new() };
        let sec = |name: &str| doc.section(name).unwrap_or(&empty);
        let known = |s: &Section, keys: &[&str]| -> Result<(), ParseError> {
            match s.entries.iter().find(|e| !keys.contains(&e.key.as_str())) {
                Some(e) => Err(ParseError { line: e.line, message: format!("[{}] has no key `{}`", s.name, e.key) }),
                None => Ok(()),
            }
        };
        let run = || -> Result<Self, ParseError> {
            let d = CollisionConfig::default();
            let c = sec("collision");
            known(c, &["mu", "b_rotor", "j_initial", "j_max", "e_col", "e_cut", "r_min", "r_max", "steps_per_wavelength", "j_total_max"])?;
            let collision = CollisionConfig {
                mu: c.parse_or("mu", d.mu)?,
                b_rotor: c.parse_or("b_rotor", d.b_rotor)?,
                j_initial: c.parse_or("j_initial", d.j_initial)?,
                e_col: c.parse_or("e_col", d.e_col)?,
                j_max: c.parse_or("j_max", d.j_max)?,
                e_cut: c.parse_or("e_cut", d.e_cut)?,
                r_min: c.parse_or("r_min", d.r_min)?,
                r_max: c.parse_or("r_max", d.r_max)?,
                steps_per_wavelength: c.parse_or("steps_per_wavelength", d.steps_per_wavelength)?,
                j_total_max: c.parse_or("j_total_max", d.j_total_max)?,
            };
            if let Err(e) = collision.validate() {
                return Err(ParseError { line: c.line, message: e.to_string() });
            }

            let p = sec("potential");
            known(p, &["file", "model"])?;
            let model = match (p.get("file"), p.get("model")) {
                (Some(f), None) => {
                    let file = resolve(&f.value);
                    if !file.is_file() {
                        return Err(ParseError {
                            line: f.line,
                            message: format!("potential file {} does not exist", file.display()),
                        });
                    }
                    ModelSource::File(file)
                }
                (None, Some(m)) if m.value == "zero" => ModelSource::Zero,
                (None, Some(m)) => {
                    return Err(ParseError { line: m.line, message: format!("unknown model `{}` (only `zero` is built in)", m.value) })
                }
                (Some(f), Some(_)) => {
                    return Err(ParseError { line: f.line, message: "give either `file` or `model`, not both".into() })
                }
                (None, None) => {
                    return Err(ParseError { line: p.line, message: "[potential] needs `file` or `model`".into() })
                }
            };

            let s = sec("scan");
            known(s, &["e_min", "e_max", "points", "refine", "prominence", "energies", "threshold_window"])?;
            let window: Vec<f64> = list(s, "threshold_window")?.unwrap_or_else(|| vec![1e-3, 2e-3]);
            let scan = ScanSpec {
                e_min: s.parse_or("e_min", 1e-3)?,
                e_max: s.parse_or("e_max", 10.0)?,
                points: s.parse_or("points", 200)?,
                refine_factor: s.parse_or("refine", 5)?,
                prominence: s.parse_or("prominence", 0.5)?,
                energies: list(s, "energies")?.unwrap_or_else(|| vec![collision.e_col]),
                threshold_window: match window[..] {
                    [a, b] if a < b => (a, b),
                    _ => {
                        let line = s.get("threshold_window").map_or(s.line, |e| e.line);
                        return Err(ParseError { line, message: "threshold_window needs two increasing energies".into() });
                    }
                },
            };
            if !(scan.e_min > 0.0 && scan.e_min < scan.e_max) || scan.points < 2 {
                return Err(ParseError { line: s.line, message: "[scan] needs 0 < e_min < e_max and points ≥ 2".into() });
            }
            if let Some(e) = scan.energies.iter().find(|e| !(**e > 0.0)) {
                let line = s.get("energies").map_or(s.line, |x| x.line);
                return Err(ParseError { line, message: format!("energy {e} K is not positive") });
            }

            let o = sec("observables");
            known(o, &["transitions", "n_theta", "preparations", "restricted_L", "smatrix"])?;
            let transitions = match o.get("transitions") {
                Some(e) => split_items(&e.value).map(|t| parse_transition(t, e.line)).collect::<Result<Vec<_>, _>>()?,
                None => vec![Transition::new(collision.j_initial, collision.j_initial.saturating_sub(1))],
            };
            for t in &transitions {
                if t.j != collision.j_initial || t.jp > collision.j_max {
                    let line = o.get("transitions").map_or(o.line, |e| e.line);
                    return Err(ParseError {
                        line,
                        message: format!("transition {} -> {} must start at j_initial = {} and end at most at j_max", t.j, t.jp, collision.j_initial),
                    });
                }
            }
            let preparations = match o.get("preparations") {
                Some(e) => split_items(&e.value).map(|p| parse_prep(p, e.line)).collect::<Result<Vec<_>, _>>()?,
                None => vec![
                    PrepSpec::Directed { beta: 0.0, alpha: 0.0 },
                    PrepSpec::Directed { beta: 90.0, alpha: 0.0 },
                    PrepSpec::Directed { beta: MAGIC_ANGLE_DEG, alpha: 0.0 },
                    PrepSpec::Unpolarized,
                ],
            };
            let smatrix_files = match o.get("smatrix") {
                Some(e) => {
                    let files: Vec<PathBuf> = split_items(&e.value).map(&resolve).collect();
                    if let Some(f) = files.iter().find(|f| !f.is_file()) {
                        return Err(ParseError { line: e.line, message: format!("S-matrix file {} does not exist", f.display()) });
                    }
                    files
                }
                None => Vec::new(),
            };
            let observables = ObservableSpec {
                transitions,
                n_theta: o.parse_or("n_theta", 720)?,
                preparations,
                restricted_l: match o.get("restricted_L") {
                    Some(e) if e.value == "none" => None,
                    Some(_) => Some(o.parse("restricted_L")?),
                    None => Some(2),
                },
                smatrix_files,
            };
            if observables.n_theta < 2 {
                return Err(ParseError { line: o.line, message: "n_theta must be at least 2".into() });
            }

            let q = sec("portrait");
            known(q, &["n_theta", "n_phi", "moments"])?;
            let portrait = PortraitSpec {
                n_theta: q.parse_or("n_theta", 36)?,
                n_phi: q.parse_or("n_phi", 72)?,
                moments: match q.get("moments") {
                    Some(e) => {
                        let f = resolve(&e.value);
                        if !f.is_file() {
                            return Err(ParseError { line: e.line, message: format!("moments file {} does not exist", f.display()) });
                        }
                        Some(f)
                    }
                    None => None,
                },
            };

            let k = sec("calibrate");
            known(k, &["epsilons", "v2_amplitudes", "sigma", "v1_amplitude", "exponent"])?;
            let g = SearchGrid::default();
            let calibration = SearchGrid {
                epsilons: list(k, "epsilons")?.unwrap_or(g.epsilons),
                v2_amplitudes: list(k, "v2_amplitudes")?.unwrap_or(g.v2_amplitudes),
                sigma: k.parse_or("sigma", g.sigma)?,
                v1_amplitude: k.parse_or("v1_amplitude", g.v1_amplitude)?,
                exponent: k.parse_or("exponent", g.exponent)?,
            };

            let r = sec("run");
            known(r, &["output", "workers", "seed"])?;
            Ok(RunConfig {
                path: path.to_path_buf(),
                collision,
                model,
                scan,
                observables,
                portrait,
                calibration,
                output: resolve(&r.get("output").map_or("out".to_string(), |e| e.value.clone())),
                workers: r.parse_or("workers", 0)?,
                seed: r.parse_or("seed", 1)?,
            })
        };
        run().map_err(|e| err(path, e))
    }

    pub fn load_model(&self) -> Result<PotentialModel, CliError> {
        match &self.model {
            ModelSource::Zero => Ok(PotentialModel::zero()),
            ModelSource::File(p) => load_model(p).map_err(|e| CliError::Config { path: p.clone(), line: None, message: e.to_string() }),
        }
    }

    /// The output directory, or its nearest existing ancestor, must be a
    /// writable directory.
    pub fn check_output(&self) -> Result<(), CliError> {
        let bad = |m: String| CliError::Config { path: self.path.clone(), line: None, message: m };
        let mut dir = self.output.as_path();
        loop {
            match std::fs::metadata(dir) {
                Ok(m) if !m.is_dir() => return Err(bad(format!("output {} is not a directory", dir.display()))),
                Ok(m) if m.permissions().readonly() => {
                    return Err(bad(format!("output directory {} is not writable", dir.display())))
                }
                Ok(_) => return Ok(()),
                Err(_) => match dir.parent() {
                    Some(p) if !p.as_os_str().is_empty() => dir = p,
                    _ => return Ok(()),
                },
            }
        }
    }

    /// Human-readable resolved plan, printed by `--dry-run`.
    pub fn describe(&self) -> String {
        let c = &self.collision;
        let mut s = String::new();
        let _ = writeln!(s, "config        {}", self.path.display());
        let _ = writeln!(s, "output        {}", self.output.display());
        let _ = writeln!(
            s,
            "collision     mu = {} amu, B = {} K, j = {} (basis up to {}), J ≤ {}, R = [{}, {}] bohr, {} steps/wavelength",
            c.mu, c.b_rotor, c.j_initial, c.j_max, c.j_total_max, c.r_min, c.r_max, c.steps_per_wavelength
        );
        let _ = writeln!(
            s,
            "potential     {}",
            match &self.model {
                ModelSource::File(p) => p.display().to_string(),
                ModelSource::Zero => "zero".into(),
            }
        );
        let sc = &self.scan;
        let _ = writeln!(
            s,
            "scan          {} log points over [{}, {}] K, refine ×{}, prominence {}",
            sc.points, sc.e_min, sc.e_max, sc.refine_factor, sc.prominence
        );
        let _ = writeln!(s, "energies      {:?} K", sc.energies);
        let o = &self.observables;
        let ts: Vec<String> = o.transitions.iter().map(|t| format!("{}->{}", t.j, t.jp)).collect();
        let ps: Vec<String> = o.preparations.iter().map(PrepSpec::label).collect();
        let _ = writeln!(s, "transitions   {}", ts.join(", "));
        let _ = writeln!(s, "preparations  {}", ps.join(", "));
        let _ = writeln!(s, "theta grid    {} Gauss-Legendre nodes", o.n_theta);
        let _ = writeln!(s, "portrait      {} x {}", self.portrait.n_theta, self.portrait.n_phi);
        let _ = writeln!(s, "workers       {}", if self.workers == 0 { "all cores".to_string() } else { self.workers.to_string() });
        s
    }
}
