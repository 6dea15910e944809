use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix must be square with dim >= 1 (got {rows} entries for dim {dim})")]
    BadShape { dim: usize, rows: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max |m - m^H| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("matrix is not unitary (max |U^H U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("amplitude count {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("qubit index {index} out of range for a {width}-qubit register")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("control and target must differ (both {0})")]
    SameControlTarget(usize),

    #[error("register width mismatch: expected {expected} qubits, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("invalid boolean function: {0}")]
    InvalidFunction(String),

    #[error("enumeration too large: m * 2^n = {requested} exceeds limit {limit}")]
    TooLarge { requested: usize, limit: usize },

    #[error("all probe parameters are below {0:e}")]
    ZeroVector(f64),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("eigenvalue {0:e} is below the clamp window")]
    NegativeEigenvalue(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
