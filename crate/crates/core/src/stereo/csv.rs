//! Versioned CSV tables. Every file opens with a schema comment line followed
//! by a column header; floats carry 17 significant digits.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{Portrait, StereoError};

pub const MOMENTS_SCHEMA: &str = "# stereodyn-moments v1";
pub const DCS_SCHEMA: &str = "# stereodyn-dcs v1";
pub const PORTRAIT_SCHEMA: &str = "# stereodyn-portrait v1";

const MOMENTS_COLUMNS: &str = "E_col_K,j,jp,k,q,re,im";

fn g(v: f64) -> String {
    format!("{v:.16e}")
}

/// One integral moment `s^(k)_q` of transition `j → jp` at `E_col`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub e_col: f64,
    pub j: u32,
    pub jp: u32,
    pub k: u32,
    pub q: i32,
    pub value: Complex64,
}

pub fn write_moments_csv(rows: &[MomentRow]) -> String {
    let mut s = format!("{MOMENTS_SCHEMA}\n{MOMENTS_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{},{}", g(r.e_col), r.j, r.jp, r.k, r.q, g(r.value.re), g(r.value.im));
    }
    s
}

pub fn read_moments_csv(text: &str) -> Result<Vec<MomentRow>, StereoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, MOMENTS_SCHEMA)) => {}
        Some((line, other)) => {
            return Err(StereoError::Parse { line, message: format!("expected `{MOMENTS_SCHEMA}`, found `{other}`") })
        }
        None => return Err(StereoError::Parse { line: 1, message: "empty file".into() }),
    }
    match lines.next() {
        Some((_, MOMENTS_COLUMNS)) => {}
        Some((line, other)) => {
            return Err(StereoError::Parse { line, message: format!("expected columns `{MOMENTS_COLUMNS}`, found `{other}`") })
        }
        None => return Err(StereoError::Parse { line: 2, message: "missing column header".into() }),
    }
    let mut rows = Vec::new();
    for (line, l) in lines {
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = l.split(',').map(str::trim).collect();
        if f.len() != 7 {
            return Err(StereoError::Parse { line, message: format!("expected 7 fields, found {}", f.len()) });
        }
        let bad = |what: &str| StereoError::Parse { line, message: format!("invalid {what}") };
        let row = MomentRow {
            e_col: f[0].parse().map_err(|_| bad("E_col"))?,
            j: f[1].parse().map_err(|_| bad("j"))?,
            jp: f[2].parse().map_err(|_| bad("jp"))?,
            k: f[3].parse().map_err(|_| bad("k"))?,
            q: f[4].parse().map_err(|_| bad("q"))?,
            value: Complex64::new(f[5].parse().map_err(|_| bad("re"))?, f[6].parse().map_err(|_| bad("im"))?),
        };
        if row.k > 2 * row.j || row.q.unsigned_abs() > row.k {
            return Err(StereoError::Parse { line, message: format!("(k, q) = ({}, {}) out of range for j = {}", row.k, row.q, row.j) });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// One point of a preparation DCS (Å²/sr).
#[derive(Debug, Clone, PartialEq)]
pub struct DcsRow {
    pub e_col: f64,
    pub theta_deg: f64,
    pub value: f64,
    pub preparation: String,
}

pub fn write_dcs_csv(rows: &[DcsRow]) -> String {
    let mut s = format!("{DCS_SCHEMA}\nE_col_K,theta_deg,dcs_A2_per_sr,preparation\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", g(r.e_col), g(r.theta_deg), g(r.value), r.preparation);
    }
    s
}

/// Portrait grids, one per energy. `weight` is the solid angle of each point,
/// so `Σ density·weight ≈ 1` for every energy.
pub fn write_portrait_csv(portraits: &[(f64, &Portrait)]) -> String {
    let mut s = format!("{PORTRAIT_SCHEMA}\nE_col_K,theta_r_deg,phi_r_deg,density,weight\n");
    for (e, p) in portraits {
        for (i, t) in p.theta.theta.iter().enumerate() {
            for (m, ph) in p.phi.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    g(*e),
                    g(t.to_degrees()),
                    g(ph.to_degrees()),
                    g(p.at(i, m)),
                    g(p.weight(i))
                );
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_round_trip() {
        let rows = vec![
            MomentRow { e_col: 0.1, j: 2, jp: 1, k: 0, q: 0, value: Complex64::new(1.0, 0.0) },
            MomentRow { e_col: 0.1, j: 2, jp: 1, k: 2, q: -1, value: Complex64::new(0.1 / 3.0, -2.0f64.sqrt()) },
        ];
        assert_eq!(read_moments_csv(&write_moments_csv(&rows)).unwrap(), rows);
    }

    #[test]
    fn rejects_unknown_version() {
        let text = write_moments_csv(&[]).replace("v1", "v9");
        assert!(matches!(read_moments_csv(&text), Err(StereoError::Parse { line: 1, .. })));
    }

    #[test]
    fn reports_bad_line() {
        let mut text = write_moments_csv(&[]);
        text.push_str("0.1,2,1,5,0,1,0\n");
        assert!(matches!(read_moments_csv(&text), Err(StereoError::Parse { line: 3, .. })));
    }
}
