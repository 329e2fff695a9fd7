//! The `stereodyn` binary end to end on small configurations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use stereodyn::ccsolver::read_smatrix_file;
use stereodyn::stereo::{moment_index, read_moments_csv, write_moments_csv, MomentRow};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stereodyn"));
    c.env_remove("STEREODYN_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn pot_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/hd_h2_surrogate.pot")
}

/// A light configuration: low partial waves and a coarse radial grid.
fn small_config(dir: &Path, potential: &str, extra: &str) -> PathBuf {
    let text = format!(
        "[collision]\nj_total_max = 4\nsteps_per_wavelength = 80\n\n[potential]\n{potential}\n\n[scan]\nenergies = 0.3, 0.6\n\n\
         [observables]\nn_theta = 64\n{extra}\n[run]\noutput = out\nworkers = 1\n"
    );
    let path = dir.join("run.ini");
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_potential_file_is_a_config_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "file = nowhere.pot", "");
    let o = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere.pot"), "{}", stderr(&o));
    assert!(stderr(&o).contains("line 6"), "{}", stderr(&o));
}

#[test]
fn config_typos_report_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "model = zero\nsteps = 3", "");
    let o = run(&["smatrix", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 7") && stderr(&o).contains("`steps`"), "{}", stderr(&o));
}

#[test]
fn dry_run_prints_the_plan_and_computes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), &format!("file = {}", pot_file().display()), "");
    let o = bin()
        .args(["scan", "--config", cfg.to_str().unwrap(), "--dry-run"])
        .env("STEREODYN_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("plan") && out.contains("scan:"), "{out}");
    assert!(out.contains("workers       3"), "{out}");
    assert!(out.contains("hd_h2_surrogate.pot"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn zero_potential_gives_identity_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "model = zero", "");
    let o = run(&["smatrix", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for e in ["0.3", "0.6"] {
        let set = read_smatrix_file(&dir.path().join(format!("out/smatrix_{e}K.txt"))).unwrap();
        assert_eq!(set.blocks.len(), 9);
        for b in &set.blocks {
            let n = b.s.nrows();
            for r in 0..n {
                for c in 0..n {
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((b.s[(r, c)] - Complex64::new(want, 0.0)).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn smatrix_files_feed_observables() {
    let dir = tempfile::tempdir().unwrap();
    let pot = format!("file = {}", pot_file().display());
    let cfg = small_config(dir.path(), &pot, "");
    assert_eq!(run(&["smatrix", "-c", cfg.to_str().unwrap()]).status.code(), Some(0));
    let cfg = small_config(dir.path(), &pot, "smatrix = out/smatrix_0.3K.txt, out/smatrix_0.6K.txt\n");
    let o = run(&["observables", "-c", cfg.to_str().unwrap(), "--out", dir.path().join("obs").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_moments_csv(&std::fs::read_to_string(dir.path().join("obs/moments.csv")).unwrap()).unwrap();
    // one transition (2 → 1), two energies, k ≤ 4
    assert_eq!(rows.len(), 2 * 25);
    for r in &rows {
        let partner = rows.iter().find(|o| o.e_col == r.e_col && o.k == r.k && o.q == -r.q).unwrap();
        let sign = if r.q % 2 == 0 { 1.0 } else { -1.0 };
        assert!((r.value.conj() * sign - partner.value).norm() < 1e-12);
    }
    let dcs = std::fs::read_to_string(dir.path().join("obs/dcs.csv")).unwrap();
    assert!(dcs.starts_with("# stereodyn-dcs v1"));
    assert_eq!(dcs.lines().count(), 2 + 2 * 4 * 64);
}

#[test]
fn malformed_smatrix_file_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "# stereodyn-smatrix v1\nmu 1.2\nE_initial nope\n").unwrap();
    let cfg = small_config(dir.path(), "model = zero", "smatrix = bad.txt\n");
    let o = run(&["observables", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn isotropic_moments_give_a_uniform_portrait() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = Vec::new();
    for k in 0..=4u32 {
        for q in -(k as i32)..=k as i32 {
            let value = if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            rows.push(MomentRow { e_col: 0.5, j: 2, jp: 1, k, q, value });
        }
    }
    assert_eq!(rows.len(), moment_index(4, 4) + 1);
    std::fs::write(dir.path().join("m.csv"), write_moments_csv(&rows)).unwrap();
    let cfg = small_config(dir.path(), "model = zero", "\n[portrait]\nmoments = m.csv\nn_theta = 8\nn_phi = 6\n");
    let o = run(&["portrait", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("out/portrait_2to1.csv")).unwrap();
    let mut total = 0.0;
    for line in text.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((f[3] - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-14);
        total += f[3] * f[4];
    }
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn unknown_moments_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), "# stereodyn-moments v9\nE_col_K,j,jp,k,q,re,im\n").unwrap();
    let cfg = small_config(dir.path(), "model = zero", "\n[portrait]\nmoments = m.csv\n");
    let o = run(&["portrait", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
}
