//! The matrix factorization pipeline: rational Cholesky, pole sweep,
//! determinant-zero sweep, polynomial extraction and canonicalization.

mod blaschke;
mod canonical;
mod cholesky;
mod extract;
mod kernel;
mod sweep;

pub use blaschke::{BlaschkeFactor, BlaschkeKind};
pub use canonical::{canonical_defect, canonicalize, triangularizing_unitary};
pub use cholesky::rational_cholesky;
pub use extract::{boundary_residual, extract_polynomial, factor_degree, EPS_DEGENERATE};
pub use kernel::{kernel_unitary, kernel_unitary_scaled, Completion, EPS_RANK};
pub use sweep::{replay_transcript, sweep_det_zeros, sweep_poles, ColumnOrder, Replayed, SweepStep};

use crate::error::{Result, Stage};
use crate::polycore::{CMatrix, Domain, MatrixLaurentPoly, RationalMatrix, C64};

/// Knobs for [`factorize`]. The defaults reproduce the reference pipeline.
#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub column_order: ColumnOrder,
    pub completion: Completion,
    /// Pin the right-unitary ambiguity at the domain anchor.
    pub canonical: bool,
    /// Boundary grid size for residual checks.
    pub grid: usize,
    /// Maximum number of zero-sweep steps; `4 m N` when unset.
    pub iteration_cap: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            column_order: ColumnOrder::Forward,
            completion: Completion::Householder,
            canonical: true,
            grid: 512,
            iteration_cap: None,
        }
    }
}

/// Evidence attached to a factor.
#[derive(Clone, Debug)]
pub struct FactorizationCertificate {
    /// Max relative boundary-grid error of `P P*` against `S`.
    pub recon_residual: f64,
    /// Roots of `det P`.
    pub det_roots: Vec<C64>,
    /// Both sweeps, in application order.
    pub sweep_transcript: Vec<SweepStep>,
    /// Constant unitary applied after extraction.
    pub unitary_fix: CMatrix,
    pub degree_certified: bool,
    /// Some determinant root lies on the boundary, so accuracy is reduced.
    pub boundary_degenerate: bool,
    /// The rational Cholesky factor the transcript starts from.
    pub cholesky: Option<RationalMatrix>,
}

impl FactorizationCertificate {
    pub fn empty(m: usize) -> Self {
        FactorizationCertificate {
            recon_residual: f64::NAN,
            det_roots: Vec::new(),
            sweep_transcript: Vec::new(),
            unitary_fix: CMatrix::identity(m, m),
            degree_certified: false,
            boundary_degenerate: false,
            cholesky: None,
        }
    }
}

/// A polynomial factor `P` with `S = P adjoint(P)` and `det P` free of
/// interior zeros.
#[derive(Clone, Debug)]
pub struct SpectralFactor {
    pub plus: MatrixLaurentPoly,
    pub certificate: FactorizationCertificate,
}

/// Factors `s` over the given domain.
pub fn factorize(s: &MatrixLaurentPoly, d: Domain, opts: &PipelineOptions) -> Result<SpectralFactor> {
    let m = s.dim();
    let chol = rational_cholesky(s, d).map_err(|e| e.at(Stage::Cholesky))?;
    let (analytic, mut transcript) =
        sweep_poles(&chol, d, opts.column_order, opts.grid).map_err(|e| e.at(Stage::PoleSweep))?;
    let cap = opts
        .iteration_cap
        .unwrap_or(4 * m * factor_degree(s, d).max(1) as usize);
    let (swept, zero_steps) = sweep_det_zeros(&analytic, d, opts.completion, opts.grid, Some(cap))
        .map_err(|e| e.at(Stage::ZeroSweep))?;
    transcript.extend(zero_steps);
    let mut f = extract_polynomial(&swept, s, d, opts.grid).map_err(|e| e.at(Stage::Extraction))?;
    f.certificate.sweep_transcript = transcript;
    f.certificate.cholesky = Some(chol);
    if opts.canonical {
        f = canonicalize(&f, d).map_err(|e| e.at(Stage::Canonicalization))?;
    }
    Ok(f)
}
