use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{context}: matrix is not square ({rows}x{cols})")]
    NotSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("{context}: matrix is not Hermitian (asymmetry {residual:.3e})")]
    NotHermitian { context: &'static str, residual: f64 },

    #[error("{context}: eigenvalue {eigenvalue:.3e} is materially negative")]
    NegativeEigenvalue {
        context: &'static str,
        eigenvalue: f64,
    },

    #[error("relation is not maximal sectorial ({0})")]
    NotMaximalSectorial(&'static str),

    #[error("form is not sectorial ({0})")]
    NotSectorial(&'static str),

    #[error("{0}: relation is multivalued")]
    Multivalued(&'static str),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("subspace is outside the admissible interval: {0}")]
    Inadmissible(String),

    /// An identity that must hold by construction was violated numerically.
    #[error("check `{check}` failed: residual {residual:.3e} exceeds {threshold:.3e}")]
    Falsified {
        check: String,
        residual: f64,
        threshold: f64,
    },
}

impl Error {
    pub(crate) fn falsified(check: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Error::Falsified {
            check: check.into(),
            residual,
            threshold,
        }
    }
}

/// Returns `Ok(())` when `residual <= threshold`, otherwise a [`Error::Falsified`].
pub(crate) fn ensure(check: &str, residual: f64, threshold: f64) -> Result<()> {
    if residual <= threshold {
        Ok(())
    } else {
        Err(Error::falsified(check, residual, threshold))
    }
}
