use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dag| = {max_deviation:e})")]
    NotHermitian { max_deviation: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("parameter {name} = {value} is out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("no sign change of the gap found on [0, 1]")]
    NoViolation,

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
