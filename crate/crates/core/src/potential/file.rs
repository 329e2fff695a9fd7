//! Potential file format.
//!
//! ```text
//! # stereodyn-potential v1
//! [model]
//! name = hd_h2_surrogate
//! odd_lambda = true
//!
//! [term]
//! lambda = 0
//! kind = lennard-jones
//! epsilon = 35.0        # K
//! sigma = 5.8           # bohr
//!
//! [term]
//! lambda = 1
//! kind = exp-dispersion
//! amplitude = 2.0e4     # K
//! exponent = 1.2        # 1/bohr
//! c6 = 0.0              # K bohr^6
//!
//! [term]
//! lambda = 2
//! kind = tabulated      # natural cubic spline, no extrapolation
//! 4.0   1.2e3           # R (bohr)  v (K), one knot per line
//! 4.5   5.1e2
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{CubicSpline, LambdaTerm, PotentialError, PotentialModel, RadialForm};
use crate::ini::{Document, ParseError};

pub const POTENTIAL_SCHEMA: &str = "# stereodyn-potential v1";

impl From<ParseError> for PotentialError {
    fn from(e: ParseError) -> Self {
        PotentialError::Parse { line: e.line, message: e.message }
    }
}

pub fn parse_model(text: &str) -> Result<PotentialModel, PotentialError> {
    let doc = Document::parse(text)?;
    match doc.header.first() {
        Some(h) if h.trim() == POTENTIAL_SCHEMA => {}
        other => {
            return Err(PotentialError::Parse {
                line: 1,
                message: format!("expected schema header `{POTENTIAL_SCHEMA}`, found {other:?}"),
            })
        }
    }
    let model = doc.section("model").ok_or(PotentialError::Parse {
        line: 1,
        message: "missing [model] section".into(),
    })?;
    let name: String = model.parse_or("name", "unnamed".to_string())?;
    let odd_lambda: bool = model.parse_or("odd_lambda", false)?;

    let mut terms = Vec::new();
    for section in doc.sections_named("term") {
        let lambda: u32 = section.parse("lambda")?;
        let kind: String = section.parse("kind")?;
        let radial = match kind.as_str() {
            "lennard-jones" => RadialForm::LennardJones {
                epsilon: section.parse("epsilon")?,
                sigma: section.parse("sigma")?,
            },
            "exp-dispersion" => RadialForm::ExpDispersion {
                amplitude: section.parse("amplitude")?,
                exponent: section.parse("exponent")?,
                c6: section.parse_or("c6", 0.0)?,
            },
            "tabulated" => {
                let mut xs = Vec::with_capacity(section.data.len());
                let mut ys = Vec::with_capacity(section.data.len());
                for (line, raw) in &section.data {
                    let cols: Vec<&str> = raw.split_whitespace().collect();
                    let parsed = match cols.as_slice() {
                        [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
                        _ => None,
                    };
                    let (x, y) = parsed.ok_or_else(|| PotentialError::Parse {
                        line: *line,
                        message: format!("expected two numeric columns `R v`, found `{raw}`"),
                    })?;
                    xs.push(x);
                    ys.push(y);
                }
                let spline = CubicSpline::natural(xs, ys).ok_or_else(|| PotentialError::Parse {
                    line: section.line,
                    message: format!("λ = {lambda}: tabulated grid needs ≥ 2 strictly increasing knots"),
                })?;
                RadialForm::Tabulated(spline)
            }
            other => {
                return Err(PotentialError::Parse {
                    line: section.required("kind")?.line,
                    message: format!("unknown kind `{other}`"),
                })
            }
        };
        if !matches!(radial, RadialForm::Tabulated(_)) {
            if let Some((line, raw)) = section.data.first() {
                return Err(PotentialError::Parse { line: *line, message: format!("unexpected line `{raw}`") });
            }
        }
        terms.push(LambdaTerm { lambda, radial });
    }
    PotentialModel::new(name, odd_lambda, terms)
}

pub fn load_model(path: &Path) -> Result<PotentialModel, PotentialError> {
    let text = std::fs::read_to_string(path).map_err(|e| PotentialError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_model(&text).map_err(|e| match e {
        PotentialError::Parse { line, message } => PotentialError::File {
            path: path.display().to_string(),
            message: format!("line {line}: {message}"),
        },
        other => other,
    })
}

/// Serialises a model; floats use 17 significant digits.
pub fn write_model(model: &PotentialModel) -> String {
    let mut out = String::new();
    writeln!(out, "{POTENTIAL_SCHEMA}").unwrap();
    writeln!(out, "[model]\nname = {}\nodd_lambda = {}", model.name(), model.odd_lambda()).unwrap();
    for t in model.terms() {
        writeln!(out, "\n[term]\nlambda = {}\nkind = {}", t.lambda, t.radial.kind()).unwrap();
        match &t.radial {
            RadialForm::LennardJones { epsilon, sigma } => {
                writeln!(out, "epsilon = {epsilon:.16e}\nsigma = {sigma:.16e}").unwrap();
            }
            RadialForm::ExpDispersion { amplitude, exponent, c6 } => {
                writeln!(out, "amplitude = {amplitude:.16e}\nexponent = {exponent:.16e}\nc6 = {c6:.16e}").unwrap();
            }
            RadialForm::Tabulated(s) => {
                let (x, y) = s.knots();
                for (a, b) in x.iter().zip(y) {
                    writeln!(out, "{a:.16e} {b:.16e}").unwrap();
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# stereodyn-potential v1
[model]
name = sample
odd_lambda = true

[term]
lambda = 0
kind = lennard-jones
epsilon = 35.0
sigma = 5.8

[term]
lambda = 1
kind = exp-dispersion
amplitude = 2.0e4
exponent = 1.2

[term]
lambda = 2
kind = tabulated
4.0 100.0
5.0 20.0
6.0 1.0
";

    #[test]
    fn parses_all_kinds_and_round_trips() {
        let m = parse_model(SAMPLE).unwrap();
        assert_eq!(m.terms().len(), 3);
        assert_eq!(m.name(), "sample");
        assert_eq!(m.radial(2, 5.0).unwrap(), 20.0);
        let again = parse_model(&write_model(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn diagnostics_name_the_line() {
        let bad = SAMPLE.replace("5.0 20.0", "5.0 x");
        match parse_model(&bad) {
            Err(PotentialError::Parse { line, .. }) => assert_eq!(line, 22),
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("kind = exp-dispersion", "kind = morse");
        assert!(matches!(parse_model(&bad), Err(PotentialError::Parse { line: 14, .. })));
        let bad = SAMPLE.replace("# stereodyn-potential v1", "# stereodyn-potential v9");
        assert!(parse_model(&bad).is_err());
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = load_model(Path::new("/nonexistent/model.pot")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/model.pot"));
    }
}
