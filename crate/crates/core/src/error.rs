use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is not one (got {0})")]
    InvalidTrace(f64),

    #[error("Kraus completeness violated: max |sum K^dag K - I| = {0:.3e}")]
    NotTracePreserving(f64),

    #[error("measurement completeness violated: max |sum M^dag M - I| = {0:.3e}")]
    NotComplete(f64),

    #[error("operator is not an isometry: max |U^dag U - I| = {0:.3e}")]
    NotIsometry(f64),

    #[error("empty operator list")]
    Empty,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No channel maps the source pair onto the targets: the source pair is
    /// less separable than the target pair.
    #[error("transform infeasible: source maximal fidelity {source_fidelity} exceeds target overlap {target_overlap}")]
    TransformInfeasible {
        source_fidelity: f64,
        target_overlap: f64,
    },

    #[error("operations are not perfectly distinguishable (disjoint: {condition_i}, identity outside product span: {condition_ii})")]
    NotDistinguishable { condition_i: bool, condition_ii: bool },

    #[error("size cap exceeded: {what} = {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: f64,
        cap: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
