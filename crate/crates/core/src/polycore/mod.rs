//! Complex polynomial, Laurent polynomial and rational function arithmetic.
//!
//! Scalars are `Complex64`. Polynomials are dense with ascending
//! coefficients; rational functions are held in factored form
//! (gain, power of `z`, zeros, poles) so products and adjoints are exact
//! bookkeeping and only sums go back through root finding.

mod laurent;
mod matrix;
mod poly;
mod rational;
mod roots;

pub use laurent::LaurentPoly;
pub use matrix::{CMatrix, MatrixLaurentPoly, RationalMatrix};
pub use poly::Poly;
pub use rational::RationalFn;
pub use roots::roots;

pub(crate) use matrix::{interpolate_on_circle, lcm_roots, matrix_norm_fro};
pub(crate) use roots::match_pairs;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// Relative threshold for dropping negligible extreme coefficients.
pub const EPS_TRIM: f64 = 1e-12;
/// Distance under which a zero and a pole are cancelled.
pub const EPS_CANCEL: f64 = 1e-7;
/// Denominator magnitude treated as a pole during evaluation.
pub const EPS_EVAL: f64 = 1e-13;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Where the factorization lives: the unit circle or the real line.
///
/// The "interior" of a domain is the open region in which the spectral
/// factor must be analytic and nonsingular: the open unit disc, or the
/// open upper half plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Disc,
    Line,
}

impl Domain {
    /// Signed depth of `z` inside the interior: `1 - |z|` on the disc,
    /// `Im z` on the line. Positive means strictly inside.
    pub fn depth(self, z: C64) -> f64 {
        match self {
            Domain::Disc => 1.0 - z.norm(),
            Domain::Line => z.im,
        }
    }

    /// Reflection across the boundary: `1/conj(z)` or `conj(z)`.
    pub fn reflect(self, z: C64) -> C64 {
        match self {
            Domain::Disc => ONE / z.conj(),
            Domain::Line => z.conj(),
        }
    }

    /// Nearest boundary point.
    pub fn project(self, z: C64) -> C64 {
        match self {
            Domain::Disc => {
                let r = z.norm();
                if r == 0.0 {
                    ONE
                } else {
                    z / r
                }
            }
            Domain::Line => C64::new(z.re, 0.0),
        }
    }

    /// Interior point at which canonical factors are pinned.
    pub fn anchor(self) -> C64 {
        match self {
            Domain::Disc => ZERO,
            Domain::Line => I,
        }
    }

    /// Sample points on the boundary.
    ///
    /// Disc: `n` roots of unity. Line: `n/2 + 1` Chebyshev nodes on
    /// `[-1, 1]` cubed and scaled to `[-50, 50]`, which keeps nodes near the
    /// ends and adds density around the origin.
    pub fn boundary_grid(self, n: usize) -> Vec<C64> {
        let n = n.max(1);
        match self {
            Domain::Disc => (0..n)
                .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
                .collect(),
            Domain::Line => {
                let count = n / 2 + 1;
                (0..count)
                    .map(|k| {
                        let t = ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos();
                        C64::new(50.0 * t * t * t, 0.0)
                    })
                    .collect()
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Disc => "disc",
            Domain::Line => "line",
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "disc" => Ok(Domain::Disc),
            "line" => Ok(Domain::Line),
            other => Err(format!("unknown domain `{other}` (expected disc or line)")),
        }
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
