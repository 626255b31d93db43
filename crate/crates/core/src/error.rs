use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A mathematical precondition of the operation does not hold.
    Precondition,
    /// The numerical solver ran out of budget.
    Solver,
    /// Reading or writing documents failed.
    Io,
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("size error: {0}")]
    Size(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}")]
    Asymmetric { i: usize, j: usize, gap: f64 },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{threshold:e}")]
    NotPsd { eigenvalue: f64, threshold: f64 },

    #[error("kernel is not negative definite: centered form {value:e} > 0 on witness {witness:?}")]
    NotNegativeDefinite { witness: Vec<f64>, value: f64 },

    #[error("map is not injective: source points {0} and {1} collapse")]
    NotInjective(usize, usize),

    #[error("model error: {0}")]
    Model(String),

    #[error("insufficient scale span: {0}")]
    InsufficientSpan(String),

    #[error("certificate refused: hypothesis `{hypothesis}` fails for member {member}: {detail}")]
    CertificateRefused {
        hypothesis: String,
        member: usize,
        detail: String,
    },

    #[error("solver failure: {message} (violation trace: {trace:?})")]
    SolverFailure { message: String, trace: Vec<f64> },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("document error: {0}")]
    Document(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            LabError::SolverFailure { .. } => ErrorKind::Solver,
            LabError::Io(_) | LabError::Document(_) | LabError::Csv(_) => ErrorKind::Io,
            _ => ErrorKind::Precondition,
        }
    }
}
