use thiserror::Error;

/// Errors raised anywhere in the adaptive pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-conforming mesh: vertex {vertex} hangs on side ({a}, {b})")]
    NonConforming { vertex: usize, a: usize, b: usize },
    #[error("degenerate element {0}: zero area")]
    Degenerate(usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("refinement closure exceeded {0} steps")]
    ClosureOverflow(usize),
    #[error("history is not a nested refinement sequence: {0}")]
    NotNested(String),
    #[error("unknown problem '{0}'")]
    UnknownProblem(String),
    #[error("unknown region id {0}")]
    UnknownRegion(u32),
    #[error("coefficient check failed: {0}")]
    Coefficient(String),
    #[error("empty discrete space: refine initial mesh")]
    EmptySpace,
    #[error("requested {requested} eigenpairs from a space of dimension {dimension}")]
    TooManyEigenpairs { requested: usize, dimension: usize },
    #[error("eigensolver did not converge after {iterations} iterations (best residuals {residuals:?})")]
    NoConvergence { iterations: usize, residuals: Vec<f64> },
    #[error("factorization failed: matrix not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),
    #[error("eigenvalue index {index} out of range 1..={available}")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("Rayleigh quotient of the zero vector")]
    ZeroVector,
    #[error("reference unavailable")]
    ReferenceUnavailable,
    #[error("marking violation: unmarked element {element} has estimator {eta} above the largest marked {max_marked}")]
    MarkingViolation { element: usize, eta: f64, max_marked: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("iteration {k}: {source}")]
    Iteration {
        k: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the eigensolver or its factorizations, with iteration
    /// context unwrapped.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::NotPositiveDefinite(_) => true,
            Error::Iteration { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
