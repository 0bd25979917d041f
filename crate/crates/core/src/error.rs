use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinfbError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e}, floor {floor:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, floor: f64 },

    #[error("matrix is not strictly-lower block-triangular (off-pattern magnitude {magnitude:e})")]
    NotBlockTriangular { magnitude: f64 },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("feedback design exceeds the power budget (remaining budget {budget:e})")]
    InfeasibleBudget { budget: f64 },

    #[error("no root of the {variant} fixed-point equation in [1, {k}]")]
    NoRoot { variant: &'static str, k: usize },

    #[error("block index ({tau}, {l}) maps outside the strictly-lower range for eta = {eta}")]
    IndexOutOfRange { tau: usize, l: usize, eta: usize },

    #[error("channel vector must be nonzero")]
    ZeroVector,

    #[error("wrong design form: expected {expected}, found {found}")]
    WrongForm {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LinfbError>;

pub(crate) fn mismatch(
    context: &'static str,
    expected: impl ToString,
    found: impl ToString,
) -> LinfbError {
    LinfbError::DimensionMismatch {
        context,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
