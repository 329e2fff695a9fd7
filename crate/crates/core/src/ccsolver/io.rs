//! Line-oriented S-matrix files.
//!
//! ```text
//! # stereodyn-smatrix v1
//! mu 1.2
//! E_initial 384
//! E_col 0.1
//! J 1
//! parity 1
//! N_channels 3
//! 0 1 0 128 1
//! ...
//! 0 0 0.93 -0.12
//! ```
//!
//! Channel lines are `idx j L E_channel open`; entry lines `row col re im`
//! use channel indices and cover open channels only. Floats carry 17
//! significant digits so a round trip is exact.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CcError, Channel, ChannelBasis, SMatrixBlock};
use crate::angular::triangle;
use crate::units;

pub const SMATRIX_SCHEMA: &str = "# stereodyn-smatrix v1";

/// Contents of an S-matrix file.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrixSet {
    /// Reduced mass (amu), needed to rebuild channel wavenumbers.
    pub mu: f64,
    /// Rotor energy of the initial level (K).
    pub e_initial: f64,
    pub blocks: Vec<SMatrixBlock>,
}

fn g(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_smatrix(set: &SMatrixSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SMATRIX_SCHEMA}");
    let _ = writeln!(out, "mu {}", g(set.mu));
    let _ = writeln!(out, "E_initial {}", g(set.e_initial));
    for b in &set.blocks {
        let _ = writeln!(out, "E_col {}", g(b.e_col));
        let _ = writeln!(out, "J {}", b.total_j);
        let _ = writeln!(out, "parity {}", b.parity);
        let _ = writeln!(out, "N_channels {}", b.basis.len());
        for (i, c) in b.basis.channels.iter().enumerate() {
            let _ = writeln!(out, "{i} {} {} {} {}", c.j, c.l, g(c.energy), u8::from(c.open));
        }
        let open = b.basis.open_indices();
        for (r, &ri) in open.iter().enumerate() {
            for (c, &ci) in open.iter().enumerate() {
                let v = b.s[(r, c)];
                let _ = writeln!(out, "{ri} {ci} {} {}", g(v.re), g(v.im));
            }
        }
    }
    out
}

pub fn write_smatrix_file(path: &Path, set: &SMatrixSet) -> Result<(), CcError> {
    std::fs::write(path, write_smatrix(set))
        .map_err(|source| CcError::Io { path: path.display().to_string(), source })
}

pub fn read_smatrix_file(path: &Path) -> Result<SMatrixSet, CcError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CcError::Io { path: path.display().to_string(), source })?;
    read_smatrix(&text)
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self { inner: it.peekable() }
    }

    fn next(&mut self, last: usize, want: &str) -> Result<(usize, Vec<&'a str>), CcError> {
        match self.inner.next() {
            Some((n, l)) => Ok((n, l.split_whitespace().collect())),
            None => Err(err(last, format!("unexpected end of file, expected {want}"))),
        }
    }

    fn keyed(&mut self, last: usize, key: &str) -> Result<(usize, &'a str), CcError> {
        let (n, t) = self.next(last, key)?;
        if t.len() != 2 || t[0] != key {
            return Err(err(n, format!("expected `{key} <value>`")));
        }
        Ok((n, t[1]))
    }
}

fn err(line: usize, message: impl Into<String>) -> CcError {
    CcError::Format { line, message: message.into() }
}

fn num<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, CcError> {
    s.parse().map_err(|_| err(line, format!("invalid {what} `{s}`")))
}

pub fn read_smatrix(text: &str) -> Result<SMatrixSet, CcError> {
    match text.lines().next().map(str::trim) {
        Some(SMATRIX_SCHEMA) => {}
        _ => return Err(err(1, format!("missing header `{SMATRIX_SCHEMA}`"))),
    }
    let mut lines = Lines::new(text);
    let (n, v) = lines.keyed(1, "mu")?;
    let mu: f64 = num(n, v, "mu")?;
    if !(mu > 0.0) {
        return Err(err(n, "mu must be positive"));
    }
    let (n, v) = lines.keyed(n, "E_initial")?;
    let e_initial: f64 = num(n, v, "E_initial")?;
    let h2m = units::hbar2_over_2mu(mu);
    let mut blocks = Vec::new();
    let mut last = n;
    while lines.inner.peek().is_some() {
        let (n, v) = lines.keyed(last, "E_col")?;
        let e_col: f64 = num(n, v, "E_col")?;
        let (n, v) = lines.keyed(n, "J")?;
        let total_j: u32 = num(n, v, "J")?;
        let (n, v) = lines.keyed(n, "parity")?;
        let parity: i32 = num(n, v, "parity")?;
        if parity != 1 && parity != -1 {
            return Err(err(n, "parity must be 1 or -1"));
        }
        let (n, v) = lines.keyed(n, "N_channels")?;
        let n_channels: usize = num(n, v, "N_channels")?;
        last = n;
        let e_total = e_col + e_initial;
        let mut channels = Vec::with_capacity(n_channels);
        let mut wavenumbers = Vec::new();
        for idx in 0..n_channels {
            let (n, t) = lines.next(last, "a channel line")?;
            last = n;
            if t.len() != 5 {
                return Err(err(n, "channel line needs `idx j L E_channel open`"));
            }
            if num::<usize>(n, t[0], "channel index")? != idx {
                return Err(err(n, format!("channel index should be {idx}")));
            }
            let j: u32 = num(n, t[1], "j")?;
            let l: u32 = num(n, t[2], "L")?;
            let energy: f64 = num(n, t[3], "E_channel")?;
            let open = match t[4] {
                "1" => true,
                "0" => false,
                s => return Err(err(n, format!("open flag must be 0 or 1, got `{s}`"))),
            };
            if !triangle(j, l, total_j) || (if (j + l) % 2 == 0 { 1 } else { -1 }) != parity {
                return Err(err(n, format!("channel (j = {j}, L = {l}) does not belong to J = {total_j}, parity {parity:+}")));
            }
            if open != (e_total - energy > 0.0) {
                return Err(err(n, "open flag disagrees with E_col + E_initial − E_channel"));
            }
            if open {
                wavenumbers.push(((e_total - energy) / h2m).sqrt());
            }
            channels.push(Channel { j, l, energy, open });
        }
        let basis = ChannelBasis { total_j, parity, e_total, channels, wavenumbers };
        let open = basis.open_indices();
        let m = open.len();
        let mut s = DMatrix::from_element(m, m, Complex64::new(f64::NAN, 0.0));
        for _ in 0..m * m {
            let (n, t) = lines.next(last, "an entry line")?;
            last = n;
            if t.len() != 4 {
                return Err(err(n, "entry line needs `row col re im`"));
            }
            let row: usize = num(n, t[0], "row")?;
            let col: usize = num(n, t[1], "col")?;
            let (Some(r), Some(c)) = (open.iter().position(|&i| i == row), open.iter().position(|&i| i == col))
            else {
                return Err(err(n, format!("entry ({row}, {col}) does not refer to open channels")));
            };
            if !s[(r, c)].re.is_nan() {
                return Err(err(n, format!("duplicate entry ({row}, {col})")));
            }
            s[(r, c)] = Complex64::new(num(n, t[2], "real part")?, num(n, t[3], "imaginary part")?);
        }
        blocks.push(SMatrixBlock { e_col, total_j, parity, basis, s, diagnostics: None });
    }
    Ok(SMatrixSet { mu, e_initial, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccsolver::{build_basis, s_from_k, CollisionConfig};

    fn sample() -> SMatrixSet {
        let cfg = CollisionConfig { e_col: 0.37, ..CollisionConfig::default() };
        let basis = build_basis(&cfg, 2, -1).unwrap();
        let m = basis.n_open();
        let k = DMatrix::from_fn(m, m, |i, j| 0.1 * (i + j) as f64 + 1.0 / (1.0 + i as f64 * j as f64) - 0.3);
        let s = s_from_k(&k);
        let block = SMatrixBlock { e_col: cfg.e_col, total_j: 2, parity: -1, basis, s, diagnostics: None };
        SMatrixSet { mu: cfg.mu, e_initial: cfg.rotor_energy(cfg.j_initial), blocks: vec![block] }
    }

    #[test]
    fn round_trip_is_exact() {
        let set = sample();
        let back = read_smatrix(&write_smatrix(&set)).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let text = write_smatrix(&sample());
        let bad = text.replacen("parity -1", "parity 0", 1);
        match read_smatrix(&bad) {
            Err(CcError::Format { line: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        let truncated: String = text.lines().take(12).map(|l| format!("{l}\n")).collect();
        assert!(matches!(read_smatrix(&truncated), Err(CcError::Format { .. })));
        assert!(matches!(read_smatrix("mu 1\n"), Err(CcError::Format { line: 1, .. })));
    }
}
