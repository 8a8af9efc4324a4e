use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max|H - H^dagger| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("basis is not orthonormal: max|<b_i|b_j> - delta_ij| = {residual:e}")]
    NotOrthonormal { residual: f64 },

    #[error("basis is incomplete: {found} vectors for dimension {dim}")]
    IncompleteBasis { dim: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown preset `{name}`; valid presets: {}", valid.join(", "))]
    UnknownPreset { name: String, valid: Vec<String> },

    #[error("no closed-form dark state for `{0}`")]
    NoClosedForm(String),

    #[error("eigensolver did not converge")]
    NoConvergence,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
