//! Angular-momentum algebra and special functions.
//!
//! All angular momenta are integers (no spin). Conventions:
//!
//! * Condon–Shortley phase throughout (Clebsch–Gordan coefficients, rotation
//!   matrices, spherical harmonics).
//! * Riccati–Bessel functions `ĵ_L(x) = x j_L(x)` and `n̂_L(x) = −x y_L(x)`, so that
//!   `ĵ_0 = sin x`, `n̂_0 = cos x` and the Wronskian `ĵ n̂' − ĵ' n̂ = −1`. An open
//!   channel's asymptotic solution is written `ĵ + K n̂` with real symmetric `K`.

mod bessel;
mod coupling;
mod rotation;

pub use bessel::{
    modified_riccati_log_derivatives, riccati_bessel, riccati_bessel_pair, RiccatiBessel,
};
pub use coupling::{
    clebsch_gordan, factorial, ln_factorial, wigner_3j, wigner_6j, EXACT_FACTORIAL_MAX,
};
pub(crate) use coupling::{cg, three_j, six_j};
pub use rotation::{legendre_p, modified_spherical_harmonic, reduced_rotation_d};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AngularError {
    #[error("angular momentum must be non-negative, got {name} = {value}")]
    NegativeMomentum { name: &'static str, value: i32 },
    #[error("projection {m} exceeds angular momentum {j}")]
    ProjectionOutOfRange { j: i32, m: i32 },
    #[error("Riccati-Bessel argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("Legendre argument {0} outside [-1, 1]")]
    ArgumentOutOfRange(f64),
}

/// True when `c` lies in the triangle `|a − b| ≤ c ≤ a + b`.
#[inline]
pub fn triangle(a: u32, b: u32, c: u32) -> bool {
    c <= a + b && a <= b + c && b <= a + c
}

#[inline]
pub(crate) fn parity_sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}
