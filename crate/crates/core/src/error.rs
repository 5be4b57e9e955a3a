use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("pentagon residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Pentagon { residual: f64, tol: f64 },

    #[error("unknown simple object `{0}`")]
    UnknownSimple(String),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
