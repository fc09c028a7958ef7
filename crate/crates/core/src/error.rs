use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("endomorphism is not an involution (max |K^2 - I| = {residual:e})")]
    NotInvolution { residual: f64 },

    #[error("no nontrivial idempotent")]
    NoNontrivialIdempotent,

    #[error("not associative (residual {residual:e})")]
    NotAssociative { residual: f64 },

    #[error("not an idempotent (max |a*a - a| = {residual:e})")]
    NotIdempotent { residual: f64 },

    #[error("spectrum violation: eigenvalue {eigenvalue} of the multiplication operator is not in {{1, 1/2, 0}}")]
    SpectrumViolation { eigenvalue: f64 },

    #[error("idempotents not orthogonal (residual {residual:e})")]
    NotOrthogonal { residual: f64 },

    #[error("idempotents do not sum to unit (residual {residual:e})")]
    NotUnitSum { residual: f64 },

    #[error("algebra has no unit element")]
    NoUnit,

    #[error("degenerate family: smallest Fisher eigenvalue {min_eigenvalue:e}")]
    DegenerateFamily { min_eigenvalue: f64 },

    #[error("eta outside domain: {0}")]
    EtaOutsideDomain(String),

    #[error("singular metric")]
    SingularMetric,

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
