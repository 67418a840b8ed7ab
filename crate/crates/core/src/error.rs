use thiserror::Error;

/// Failure modes shared by every geometric operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate simplex: points are affinely dependent")]
    DegenerateSimplex,

    #[error("point {point} is not in convex position")]
    NotInConvexPosition { point: usize },

    #[error("genericity violation at points {ids:?}: {reason}")]
    GenericityViolation { ids: Vec<usize>, reason: String },

    #[error("facet {facet:?} is not a BM-ear")]
    NotABMEar { facet: Vec<usize> },

    #[error("malformed triangulation: {0}")]
    MalformedTriangulation(String),

    #[error("generation failed: {0}")]
    GenerationFailed(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl GeomError {
    pub(crate) fn generic(mut ids: Vec<usize>, reason: impl Into<String>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        GeomError::GenericityViolation {
            ids,
            reason: reason.into(),
        }
    }

    /// True for the errors that mean "the input is not a generic convex polytope".
    pub fn is_input_rejection(&self) -> bool {
        matches!(
            self,
            GeomError::NotInConvexPosition { .. }
                | GeomError::GenericityViolation { .. }
                | GeomError::DegenerateSimplex
                | GeomError::InvalidInput(_)
                | GeomError::DimensionMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
