use crate::structured::StructureKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not {kind}: entry ({row}, {col}) deviates by {deviation:e}")]
    StructureViolation {
        kind: StructureKind,
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("structure class {class} cannot be applied: {reason}")]
    IncompatibleClass { class: String, reason: String },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("matrix is singular (zero pivot at column {0})")]
    Singular(usize),
    #[error("weighting matrix is not Hermitian positive definite")]
    NotPositiveDefinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("backward error undefined: {0}")]
    Undefined(&'static str),
}

pub(crate) fn shape_err(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
