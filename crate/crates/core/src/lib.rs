//! Spectral factorization of matrix Laurent polynomials.
//!
//! Given `S(z)` positive definite on the unit circle (or a matrix polynomial
//! positive definite on the real line), [`matfact::factorize`] returns the
//! polynomial factor `S⁺` with `S = S⁺ · adjoint(S⁺)` whose determinant has
//! no zeros in the open unit disc (open upper half plane), together with a
//! certificate. The construction runs a rational Cholesky factorization,
//! then moves poles and determinant zeros out of the interior with
//! elementary Blaschke multipliers.

pub mod cli;
pub mod error;
pub mod generate;
pub mod matfact;
pub mod polycore;
pub mod scalarfact;
pub mod verify;

pub use error::{Error, Result, Stage};
pub use polycore::{CMatrix, Domain, LaurentPoly, MatrixLaurentPoly, Poly, RationalFn, RationalMatrix, C64};
