use thiserror::Error;

/// Errors raised across the library. Each variant maps onto one failure
/// class of the public operations; the CLI turns all of them into exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("probe-domain error at jet {jet}: {reason}")]
    ProbeDomain { jet: String, reason: String },

    #[error("rank error: {0}")]
    Rank(String),

    #[error("constraint infeasible: {0}")]
    ConstraintInfeasible(String),

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("section escapes the domain: {0}")]
    SectionEscape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("scheme is not monotone for this coefficient matrix: {0}")]
    Anisotropy(String),

    #[error("iteration limit reached after {iterations} iterations (residual {residual:e})")]
    IterationLimit {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("small-data guard: {0}")]
    SmallData(String),

    #[error("admissibility error: {0}")]
    Admissibility(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
