use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyDimension,

    #[error("matrix is not skew-Hermitian: ||S + S^H||_F = {residual:e}")]
    NotSkewHermitian { residual: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("matrix is singular or ill-conditioned (reciprocal condition {rcond:e})")]
    Singular { rcond: f64 },

    #[error("Hermitian eigensolver did not converge")]
    EigenFailure,

    #[error("matrix is not unitary: ||M^H M - I||_F = {drift:e}")]
    NonUnitary { drift: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("degenerate channel: ||h||^2 = {norm_sq:e} is below the identifiability floor")]
    DegenerateChannel { norm_sq: f64 },

    #[error("group size {group_size} does not divide {n}")]
    InvalidGroupSize { group_size: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
