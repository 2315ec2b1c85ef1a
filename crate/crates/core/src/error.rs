use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Pipeline stage that produced an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Cholesky,
    PoleSweep,
    ZeroSweep,
    Extraction,
    Canonicalization,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Cholesky => "cholesky",
            Stage::PoleSweep => "pole-sweep",
            Stage::ZeroSweep => "zero-sweep",
            Stage::Extraction => "extraction",
            Stage::Canonicalization => "canonicalization",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("pole at evaluation point {0}")]
    PoleAtEvaluationPoint(Complex64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate leading coefficient")]
    DegenerateLeadingCoefficient,
    #[error("division by the zero function")]
    ZeroDivisor,
    #[error("input is not self-adjoint (deviation {0:.3e})")]
    NotSelfAdjoint(f64),
    #[error("input is negative on the boundary (minimum {min:.3e}, scale {scale:.3e})")]
    NegativeOnBoundary { min: f64, scale: f64 },
    #[error("root {0} has no reflected partner")]
    UnpairedRoot(Complex64),
    #[error("leading principal minor {0} vanishes identically")]
    SingularPrincipalMinor(usize),
    #[error("pole {0} lies on the boundary")]
    PoleOnBoundary(Complex64),
    #[error("determinant zero {0} near the boundary cannot be cleared")]
    ZeroOnBoundaryUnresolvable(Complex64),
    #[error("iteration limit {0} exceeded")]
    IterationLimitExceeded(usize),
    #[error("matrix is not singular (smallest singular value {sigma:.3e}, norm {norm:.3e})")]
    NotSingular { sigma: f64, norm: f64 },
    #[error("entry ({row}, {col}) keeps a non-constant denominator")]
    ResidualDenominator { row: usize, col: usize },
    #[error("factor degree {found} exceeds bound {bound}")]
    DegreeOverflow { found: usize, bound: usize },
    #[error("factor degree {found} falls short of required degree {required}")]
    DegreeDeficit { found: usize, required: usize },
    #[error("factor is singular at the canonical anchor")]
    AnchorSingular,
    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        match self {
            tagged @ Error::Stage { .. } => tagged,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// The innermost error, with any stage tag removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// Errors caused by the input violating the factorization hypotheses,
    /// as opposed to numerical breakdown inside the pipeline.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.root(),
            Error::NotSelfAdjoint(_)
                | Error::NegativeOnBoundary { .. }
                | Error::SingularPrincipalMinor(_)
                | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
