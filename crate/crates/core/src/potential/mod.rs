//! Anisotropic rotor–partner interaction `V(R, θ) = Σ_λ v_λ(R) P_λ(cos θ)`.
//!
//! Energies are in kelvin and distances in bohr.

mod calibrate;
mod file;
mod spline;

pub use calibrate::{
    surrogate_calibration, surrogate_model, CalibrationCandidate, CalibrationError, CalibrationReport, PeakSummary,
    ResonanceTarget, SearchGrid,
};
pub use file::{load_model, parse_model, write_model, POTENTIAL_SCHEMA};
pub use spline::CubicSpline;

use thiserror::Error;

use crate::angular::{self, triangle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("R = {r} bohr is outside the tabulated range [{lo}, {hi}] of the λ = {lambda} term")]
    OutOfRange { lambda: u32, r: f64, lo: f64, hi: f64 },
    #[error("R must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("duplicate λ = {0}")]
    DuplicateLambda(u32),
    #[error("odd λ = {0} is not allowed for a model without odd anisotropy")]
    OddLambda(u32),
    #[error("λ = {lambda} term does not vanish at R = {r} bohr: |v| = {value:e} K")]
    TailTooLarge { lambda: u32, r: f64, value: f64 },
    #[error("invalid radial form: {0}")]
    InvalidForm(String),
    #[error("channel (j = {j}, L = {l}) cannot couple to J = {total}")]
    InvalidChannel { j: u32, l: u32, total: u32 },
    #[error("{path}: {message}")]
    File { path: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Radial coefficient `v_λ(R)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialForm {
    /// `4ε[(σ/R)^12 − (σ/R)^6]`
    LennardJones { epsilon: f64, sigma: f64 },
    /// `A e^{−aR} − C6 / R^6`
    ExpDispersion { amplitude: f64, exponent: f64, c6: f64 },
    /// Natural cubic spline through `(R_i, v_i)`.
    Tabulated(CubicSpline),
}

impl RadialForm {
    pub fn kind(&self) -> &'static str {
        match self {
            RadialForm::LennardJones { .. } => "lennard-jones",
            RadialForm::ExpDispersion { .. } => "exp-dispersion",
            RadialForm::Tabulated(_) => "tabulated",
        }
    }

    fn value(&self, lambda: u32, r: f64) -> Result<f64, PotentialError> {
        match self {
            RadialForm::LennardJones { epsilon, sigma } => {
                let s6 = (sigma / r).powi(6);
                Ok(4.0 * epsilon * (s6 * s6 - s6))
            }
            RadialForm::ExpDispersion { amplitude, exponent, c6 } => {
                Ok(amplitude * (-exponent * r).exp() - c6 / r.powi(6))
            }
            RadialForm::Tabulated(spline) => spline.eval(r).ok_or_else(|| {
                let (lo, hi) = spline.range();
                PotentialError::OutOfRange { lambda, r, lo, hi }
            }),
        }
    }

    /// True if the form has a power-law tail (decays slower than exponentially).
    pub fn has_dispersion_tail(&self) -> bool {
        match self {
            RadialForm::LennardJones { .. } => true,
            RadialForm::ExpDispersion { c6, .. } => *c6 != 0.0,
            RadialForm::Tabulated(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTerm {
    pub lambda: u32,
    pub radial: RadialForm,
}

/// Immutable interaction model, sorted by ascending λ.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel {
    name: String,
    odd_lambda: bool,
    terms: Vec<LambdaTerm>,
}

impl PotentialModel {
    pub fn new(
        name: impl Into<String>,
        odd_lambda: bool,
        mut terms: Vec<LambdaTerm>,
    ) -> Result<Self, PotentialError> {
        terms.sort_by_key(|t| t.lambda);
        for w in terms.windows(2) {
            if w[0].lambda == w[1].lambda {
                return Err(PotentialError::DuplicateLambda(w[0].lambda));
            }
        }
        for t in &terms {
            if !odd_lambda && t.lambda % 2 == 1 {
                return Err(PotentialError::OddLambda(t.lambda));
            }
            match &t.radial {
                RadialForm::LennardJones { sigma, .. } if *sigma <= 0.0 => {
                    return Err(PotentialError::InvalidForm(format!("λ = {}: σ must be positive", t.lambda)))
                }
                RadialForm::ExpDispersion { exponent, .. } if *exponent < 0.0 => {
                    return Err(PotentialError::InvalidForm(format!(
                        "λ = {}: exponent must be non-negative",
                        t.lambda
                    )))
                }
                _ => {}
            }
        }
        Ok(Self { name: name.into(), odd_lambda, terms })
    }

    /// Zero interaction (no terms).
    pub fn zero() -> Self {
        Self { name: "zero".into(), odd_lambda: false, terms: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn odd_lambda(&self) -> bool {
        self.odd_lambda
    }

    pub fn terms(&self) -> &[LambdaTerm] {
        &self.terms
    }

    pub fn lambdas(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.iter().map(|t| t.lambda)
    }

    /// Fills `out[i]` with `v_λ(R)` for the i-th term.
    pub fn radial_values(&self, r: f64, out: &mut [f64]) -> Result<(), PotentialError> {
        if r <= 0.0 {
            return Err(PotentialError::NonPositiveDistance(r));
        }
        for (slot, t) in out.iter_mut().zip(&self.terms) {
            *slot = t.radial.value(t.lambda, r)?;
        }
        Ok(())
    }

    pub fn radial(&self, lambda: u32, r: f64) -> Result<f64, PotentialError> {
        match self.terms.iter().find(|t| t.lambda == lambda) {
            Some(t) => t.radial.value(lambda, r),
            None => Ok(0.0),
        }
    }

    /// `V(R, θ)` in kelvin.
    pub fn evaluate(&self, r: f64, cos_theta: f64) -> Result<f64, PotentialError> {
        if r <= 0.0 {
            return Err(PotentialError::NonPositiveDistance(r));
        }
        let mut v = 0.0;
        for t in &self.terms {
            v += t.radial.value(t.lambda, r)? * angular::legendre_p(t.lambda, cos_theta.clamp(-1.0, 1.0))
                .expect("clamped argument");
        }
        Ok(v)
    }

    /// Largest `|v_λ(R)|` over anisotropic terms (λ > 0).
    pub fn anisotropy_magnitude(&self, r: f64) -> Result<f64, PotentialError> {
        let mut m: f64 = 0.0;
        for t in self.terms.iter().filter(|t| t.lambda > 0) {
            m = m.max(t.radial.value(t.lambda, r)?.abs());
        }
        Ok(m)
    }

    /// Largest `|v_λ(R)|` over all terms.
    pub fn magnitude(&self, r: f64) -> Result<f64, PotentialError> {
        let mut m: f64 = 0.0;
        for t in &self.terms {
            m = m.max(t.radial.value(t.lambda, r)?.abs());
        }
        Ok(m)
    }

    /// Checks that every radial term has decayed below `tolerance` (K) at `r_max`.
    pub fn check_tail(&self, r_max: f64, tolerance: f64) -> Result<(), PotentialError> {
        for t in &self.terms {
            let value = t.radial.value(t.lambda, r_max)?;
            if value.abs() >= tolerance {
                return Err(PotentialError::TailTooLarge { lambda: t.lambda, r: r_max, value: value.abs() });
            }
        }
        Ok(())
    }

    /// Upper end of the tabulated range, if any term is tabulated.
    pub fn tabulated_limit(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter_map(|t| match &t.radial {
                RadialForm::Tabulated(s) => Some(s.range().1),
                _ => None,
            })
            .reduce(f64::min)
    }

    /// Model with the anisotropic terms scaled by `factor`; `factor = 0` drops them.
    pub fn with_anisotropy_scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.lambda == 0 || factor != 0.0)
            .map(|t| {
                if t.lambda == 0 {
                    return t.clone();
                }
                let radial = match &t.radial {
                    RadialForm::LennardJones { epsilon, sigma } => {
                        RadialForm::LennardJones { epsilon: epsilon * factor, sigma: *sigma }
                    }
                    RadialForm::ExpDispersion { amplitude, exponent, c6 } => RadialForm::ExpDispersion {
                        amplitude: amplitude * factor,
                        exponent: *exponent,
                        c6: c6 * factor,
                    },
                    RadialForm::Tabulated(s) => {
                        let (x, y) = s.knots();
                        RadialForm::Tabulated(
                            CubicSpline::natural(x.to_vec(), y.iter().map(|v| v * factor).collect())
                                .expect("scaling preserves the grid"),
                        )
                    }
                };
                LambdaTerm { lambda: t.lambda, radial }
            })
            .collect();
        Self { name: self.name.clone(), odd_lambda: self.odd_lambda, terms }
    }
}

/// Percival–Seaton coefficient `⟨(j L) J | P_λ | (j' L') J⟩`:
///
/// `(−1)^{j+j'−J} √[(2j+1)(2j'+1)(2L+1)(2L'+1)] (j' λ j; 0 0 0)(L' λ L; 0 0 0) {j L J; L' j' λ}`.
pub fn coupling_element(j: u32, l: u32, jp: u32, lp: u32, total: u32, lambda: u32) -> Result<f64, PotentialError> {
    if !triangle(j, l, total) {
        return Err(PotentialError::InvalidChannel { j, l, total });
    }
    if !triangle(jp, lp, total) {
        return Err(PotentialError::InvalidChannel { j: jp, l: lp, total });
    }
    Ok(coupling_unchecked(j, l, jp, lp, total, lambda))
}

pub(crate) fn coupling_unchecked(j: u32, l: u32, jp: u32, lp: u32, total: u32, lambda: u32) -> f64 {
    if (j + lambda + jp) % 2 == 1 || (l + lambda + lp) % 2 == 1 {
        return 0.0;
    }
    let phase = angular::parity_sign(j as i64 + jp as i64 - total as i64);
    let dims = ((2 * j + 1) * (2 * jp + 1) * (2 * l + 1) * (2 * lp + 1)) as f64;
    phase
        * dims.sqrt()
        * angular::three_j(jp, lambda, j, 0, 0, 0)
        * angular::three_j(lp, lambda, l, 0, 0, 0)
        * angular::six_j(j, l, total, lp, jp, lambda)
}
