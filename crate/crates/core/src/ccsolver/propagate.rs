use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use super::{CcError, ChannelBasis, CollisionConfig};
use crate::angular::{modified_riccati_log_derivatives, riccati_bessel_pair};
use crate::linalg::solve_in_place;
use crate::potential::{coupling_unchecked, PotentialModel};

/// Anisotropic terms below this (K) are treated as zero.
const ANISOTROPY_CUTOFF: f64 = 1e-10;
/// The far region starts once `|v_0| R² · 2μ/ħ²` is below this.
const ISOTROPIC_STRENGTH: f64 = 0.05;
/// Matching radius tail rule: every `|v_λ(R)|` below this fraction of `E_col`.
const TAIL_FRACTION: f64 = 1e-6;
const TAIL_SEARCH_LIMIT: f64 = 1e5;

/// Radii used for one energy and model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPlan {
    pub r_min: f64,
    /// End of coupled propagation; closed channels are eliminated here.
    pub r_mid: f64,
    /// Matching radius for the open channels.
    pub r_match: f64,
}

/// Picks `r_mid` (couplings negligible, isotropic term perturbative) and
/// `r_match` (the tail rule, never below `cfg.r_max`).
pub fn radial_plan(model: &PotentialModel, cfg: &CollisionConfig) -> Result<RadialPlan, CcError> {
    cfg.validate()?;
    let limit = model.tabulated_limit().unwrap_or(f64::INFINITY);
    let mut r_match = cfg.r_max.min(limit);
    let tail = TAIL_FRACTION * cfg.e_col;
    while model.magnitude(r_match)? >= tail {
        let next = r_match * 1.05;
        if next > limit || next > TAIL_SEARCH_LIMIT {
            log::warn!(
                "potential tail still {:e} K at R = {r_match:.1} bohr; matching there",
                model.magnitude(r_match)?
            );
            break;
        }
        r_match = next;
    }
    let inv = 1.0 / cfg.hbar2_over_2mu();
    let mut r_mid = cfg.r_min;
    while r_mid < r_match {
        let iso = model.radial(0, r_mid)?.abs() * inv * r_mid * r_mid;
        if model.anisotropy_magnitude(r_mid)? < ANISOTROPY_CUTOFF && iso < ISOTROPIC_STRENGTH {
            break;
        }
        r_mid = (r_mid + 0.5).min(r_match);
    }
    Ok(RadialPlan { r_min: cfg.r_min, r_mid, r_match })
}

/// Transfer of one uncoupled open channel from `r_mid` to `r_match`, acting on
/// the coefficients `(a, b)` of `ψ = a ĵ_L(kR) + b n̂_L(kR)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarTransfer {
    pub m: [[f64; 2]; 2],
    pub steps: usize,
}

impl FarTransfer {
    pub const IDENTITY: FarTransfer = FarTransfer { m: [[1.0, 0.0], [0.0, 1.0]], steps: 0 };
}

/// Output of [`propagate`].
#[derive(Debug, Clone)]
pub struct Propagated {
    pub plan: RadialPlan,
    /// Log-derivative over the full basis at `plan.r_mid`, row-major.
    pub y: Vec<f64>,
    /// Per channel; identity for closed channels.
    pub far: Vec<FarTransfer>,
    pub inner_steps: usize,
}

pub(crate) type FarCache = Mutex<HashMap<(u32, u32), FarTransfer>>;

/// Propagates one block: coupled log-derivative from `r_min` to `r_mid`,
/// then per-channel transfers out to `r_match`.
pub fn propagate(basis: &ChannelBasis, model: &PotentialModel, cfg: &CollisionConfig) -> Result<Propagated, CcError> {
    let plan = radial_plan(model, cfg)?;
    propagate_with(basis, model, cfg, &plan, None)
}

pub(crate) fn propagate_with(
    basis: &ChannelBasis,
    model: &PotentialModel,
    cfg: &CollisionConfig,
    plan: &RadialPlan,
    cache: Option<&FarCache>,
) -> Result<Propagated, CcError> {
    if basis.is_empty() {
        return Err(CcError::EmptyBasis { total_j: basis.total_j, parity: basis.parity });
    }
    let ham = BlockHamiltonian::new(basis, model, cfg);
    let n = ham.n;
    let mut w = vec![0.0; n * n];
    let mut radial = vec![0.0; model.terms().len()];

    ham.fill(plan.r_min, &mut w, &mut radial)?;
    let mut y = vec![0.0; n * n];
    for i in 0..n {
        y[i * n + i] = regular_log_derivative(basis.channels[i].l, w[i * n + i], ham.centrifugal[i], plan.r_min);
    }

    let spw = cfg.steps_per_wavelength as f64;
    let mut inner_steps = 0;
    let mut ws = Workspace::new(n);
    let mut a = plan.r_min;
    while a < plan.r_mid {
        let b = (a + (0.1 * a).max(0.5)).min(plan.r_mid);
        let mut k_loc: f64 = 0.0;
        for r in [a, 0.5 * (a + b), b] {
            ham.fill(r, &mut w, &mut radial)?;
            for i in 0..n {
                k_loc = k_loc.max(w[i * n + i].abs().sqrt());
            }
        }
        let mut steps = ((spw * k_loc * (b - a) / (2.0 * PI)).ceil() as usize).max(2);
        steps += steps % 2;
        johnson_segment(&mut |r, out| ham.fill(r, out, &mut radial), n, &mut y, a, b, steps, &mut ws)?;
        inner_steps += steps;
        a = b;
    }
    symmetrize(&mut y, n);

    let mut far = vec![FarTransfer::IDENTITY; n];
    if plan.r_match > plan.r_mid && model.terms().iter().any(|t| t.lambda == 0) {
        let mut k_iter = basis.wavenumbers.iter();
        for (i, ch) in basis.channels.iter().enumerate() {
            if !ch.open {
                continue;
            }
            let k = *k_iter.next().expect("one wavenumber per open channel");
            let key = (ch.j, ch.l);
            if let Some(t) = cache.and_then(|c| c.lock().expect("far cache").get(&key).copied()) {
                far[i] = t;
                continue;
            }
            let t = far_transfer(model, cfg, ch.l, k, plan)?;
            if let Some(c) = cache {
                c.lock().expect("far cache").insert(key, t);
            }
            far[i] = t;
        }
    }
    Ok(Propagated { plan: *plan, y, far, inner_steps })
}

/// Log-derivative of the regular solution for a locally constant `W`: the
/// exact free solution when the potential vanishes.
fn regular_log_derivative(l: u32, w_ii: f64, centrifugal: f64, r: f64) -> f64 {
    let c = w_ii - centrifugal / (r * r);
    if c < 0.0 {
        let k = (-c).sqrt();
        let rb = riccati_bessel_pair(l, k * r);
        if rb.j == 0.0 {
            return 1e30;
        }
        k * rb.dj / rb.j
    } else if c > 0.0 {
        let kappa = c.sqrt();
        kappa * modified_riccati_log_derivatives(l, kappa * r).0
    } else {
        (l + 1) as f64 / r
    }
}

/// `W(R) = (2μ/ħ²)[Σ_λ v_λ(R) f_λ + (E_j − E) 1] + L(L+1)/R²` for one block.
struct BlockHamiltonian<'a> {
    model: &'a PotentialModel,
    n: usize,
    /// Per model term: `f_λ / (ħ²/2μ)`, row-major, or `None` if identically zero.
    couplings: Vec<Option<Vec<f64>>>,
    threshold: Vec<f64>,
    centrifugal: Vec<f64>,
}

impl<'a> BlockHamiltonian<'a> {
    fn new(basis: &ChannelBasis, model: &'a PotentialModel, cfg: &CollisionConfig) -> Self {
        let n = basis.len();
        let inv = 1.0 / cfg.hbar2_over_2mu();
        let total = basis.total_j;
        let couplings = model
            .terms()
            .iter()
            .map(|t| {
                let mut f = vec![0.0; n * n];
                for (i, a) in basis.channels.iter().enumerate() {
                    for (k, b) in basis.channels.iter().enumerate() {
                        f[i * n + k] = inv * coupling_unchecked(a.j, a.l, b.j, b.l, total, t.lambda);
                    }
                }
                f.iter().any(|&x| x != 0.0).then_some(f)
            })
            .collect();
        let threshold = basis.channels.iter().map(|c| inv * (c.energy - basis.e_total)).collect();
        let centrifugal = basis.channels.iter().map(|c| (c.l * (c.l + 1)) as f64).collect();
        Self { model, n, couplings, threshold, centrifugal }
    }

    fn fill(&self, r: f64, w: &mut [f64], radial: &mut [f64]) -> Result<(), CcError> {
        self.model.radial_values(r, radial)?;
        w.fill(0.0);
        for (f, &v) in self.couplings.iter().zip(radial.iter()) {
            if let Some(f) = f {
                for (wi, fi) in w.iter_mut().zip(f) {
                    *wi += v * fi;
                }
            }
        }
        let r2 = r * r;
        for i in 0..self.n {
            w[i * self.n + i] += self.threshold[i] + self.centrifugal[i] / r2;
        }
        Ok(())
    }
}

struct Workspace {
    w: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self { w: vec![0.0; n * n], a: vec![0.0; n * n], b: vec![0.0; n * n] }
    }
}

/// Johnson's log-derivative method for `Y' = W − Y²` over `[a, b]` with an
/// even number of steps. `y` is updated in place.
fn johnson_segment<F>(
    w_at: &mut F,
    n: usize,
    y: &mut [f64],
    a: f64,
    b: f64,
    steps: usize,
    ws: &mut Workspace,
) -> Result<(), CcError>
where
    F: FnMut(f64, &mut [f64]) -> Result<(), CcError>,
{
    debug_assert!(steps >= 2 && steps % 2 == 0);
    let h = (b - a) / steps as f64;
    let h3 = h / 3.0;
    w_at(a, &mut ws.w)?;
    for (yi, wi) in y.iter_mut().zip(&ws.w) {
        *yi += h3 * wi;
    }
    for k in 1..=steps {
        let r = if k == steps { b } else { a + k as f64 * h };
        // free step: Y ← (1 + hY)⁻¹ Y
        for i in 0..n * n {
            ws.a[i] = h * y[i];
        }
        for i in 0..n {
            ws.a[i * n + i] += 1.0;
        }
        if !solve_in_place(&mut ws.a, y, n, n) {
            return Err(CcError::Propagation { r, message: "singular free-step matrix".into() });
        }
        w_at(r, &mut ws.w)?;
        let weight = if k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        if k % 2 == 1 {
            // U = (1 − h²/6 W)⁻¹ W
            let c = h * h / 6.0;
            for i in 0..n * n {
                ws.a[i] = -c * ws.w[i];
                ws.b[i] = ws.w[i];
            }
            for i in 0..n {
                ws.a[i * n + i] += 1.0;
            }
            if !solve_in_place(&mut ws.a, &mut ws.b, n, n) {
                return Err(CcError::Propagation { r, message: "singular midpoint correction".into() });
            }
            for (yi, ui) in y.iter_mut().zip(&ws.b) {
                *yi += weight * h3 * ui;
            }
        } else {
            for (yi, wi) in y.iter_mut().zip(&ws.w) {
                *yi += weight * h3 * wi;
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(CcError::Propagation { r, message: "non-finite log-derivative".into() });
        }
    }
    Ok(())
}

fn symmetrize(y: &mut [f64], n: usize) {
    for i in 0..n {
        for k in i + 1..n {
            let m = 0.5 * (y[i * n + k] + y[k * n + i]);
            y[i * n + k] = m;
            y[k * n + i] = m;
        }
    }
}

/// Propagates a log-derivative matrix `y` (row-major, `n × n`) from `a` to
/// `b` in `steps` equal steps (rounded up to even) of Johnson's method.
/// `w(r, out)` must fill `out` with `W(r)` for `ψ'' = W ψ`.
pub fn johnson_propagate<F>(mut w: F, n: usize, y: &mut [f64], a: f64, b: f64, steps: usize) -> Result<(), CcError>
where
    F: FnMut(f64, &mut [f64]),
{
    if y.len() != n * n {
        return Err(CcError::InvalidConfig(format!("log-derivative has {} entries, expected {}", y.len(), n * n)));
    }
    if !(b > a) {
        return Err(CcError::InvalidConfig(format!("empty interval [{a}, {b}]")));
    }
    let steps = steps.max(2);
    let steps = steps + steps % 2;
    let mut ws = Workspace::new(n);
    johnson_segment(
        &mut |r, out| {
            w(r, out);
            Ok(())
        },
        n,
        y,
        a,
        b,
        steps,
        &mut ws,
    )
}

/// Variation-of-parameters transfer for `ψ'' = [L(L+1)/R² − k² + U(R)] ψ`
/// with `U = v_0/(ħ²/2μ)`, integrated by classical Runge–Kutta.
fn far_transfer(
    model: &PotentialModel,
    cfg: &CollisionConfig,
    l: u32,
    k: f64,
    plan: &RadialPlan,
) -> Result<FarTransfer, CcError> {
    let inv = 1.0 / cfg.hbar2_over_2mu();
    let spw = cfg.steps_per_wavelength as f64;
    // d/dR (a, b) = (U/k) [[n̂ĵ, n̂²], [−ĵ², −ĵn̂]] (a, b)
    let rhs = |r: f64, m: &[f64; 4]| -> Result<[f64; 4], CcError> {
        let u = model.radial(0, r)? * inv / k;
        let rb = riccati_bessel_pair(l, k * r);
        let (p, q, s) = (rb.n * rb.j, rb.n * rb.n, rb.j * rb.j);
        let mut d = [0.0; 4];
        for c in 0..2 {
            let (a, b) = (m[c], m[2 + c]);
            d[c] = u * (p * a + q * b);
            d[2 + c] = -u * (s * a + p * b);
        }
        Ok(d)
    };
    let mut m = [1.0, 0.0, 0.0, 1.0];
    let mut r = plan.r_mid;
    let mut steps = 0;
    while r < plan.r_match {
        let h = (2.0 * PI / (k * spw)).min(0.02 * r).min(plan.r_match - r);
        let k1 = rhs(r, &m)?;
        let k2 = rhs(r + 0.5 * h, &axpy(&m, 0.5 * h, &k1))?;
        let k3 = rhs(r + 0.5 * h, &axpy(&m, 0.5 * h, &k2))?;
        let k4 = rhs(r + h, &axpy(&m, h, &k3))?;
        for i in 0..4 {
            m[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(CcError::Propagation { r, message: format!("non-finite far-region transfer (L = {l})") });
        }
        r += h;
        steps += 1;
    }
    Ok(FarTransfer { m: [[m[0], m[1]], [m[2], m[3]]], steps })
}

fn axpy(m: &[f64; 4], h: f64, d: &[f64; 4]) -> [f64; 4] {
    [m[0] + h * d[0], m[1] + h * d[1], m[2] + h * d[2], m[3] + h * d[3]]
}
