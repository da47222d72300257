use thiserror::Error;

pub type Result<T> = std::result::Result<T, PgmError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PgmError {
    /// Graph-shape violations: cycles, self-loops, duplicate edges.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("argument error: {0}")]
    Argument(String),

    /// Malformed tabular input. `row` is 1-based and counts the header as row 1.
    #[error("ingestion error at row {row}, column {column}: {message}")]
    Ingestion {
        row: usize,
        column: String,
        message: String,
    },

    #[error("degenerate variance in column '{0}'")]
    DegenerateVariance(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("collinearity: {0}")]
    Collinearity(String),

    #[error("graph is not decomposable: {0}")]
    NotDecomposable(String),

    #[error("inconsistent evidence: {0}")]
    InconsistentEvidence(String),

    #[error("no samples agree with the evidence ({0} drawn); raise the sample size or use likelihood weighting")]
    InsufficientAcceptance(usize),

    #[error("{failed} of {total} bootstrap replicates failed (limit 20%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("model file error: {0}")]
    Model(String),
}

impl PgmError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        PgmError::Argument(msg.into())
    }
}

impl From<std::io::Error> for PgmError {
    fn from(e: std::io::Error) -> Self {
        PgmError::Io(e.to_string())
    }
}
