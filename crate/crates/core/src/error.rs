use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}): {context}")]
    NonConvergence { context: String, iterations: usize, residual: f64 },
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("no real root: {0}")]
    NoRealRoot(String),
    #[error("out of phase: {0}")]
    OutOfPhase(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("quadrature did not reach tolerance (error estimate {estimate:.3e})")]
    QuadratureFailure { estimate: f64 },
    #[error("integration failed at {at}: {reason}")]
    IntegrationError { at: f64, reason: String },
    #[error("matrix of {rows} rows exceeds the dense guard of {limit}")]
    SizeGuard { rows: usize, limit: usize },
    #[error("exactly singular pivot at index {0}")]
    ExactSingularity(usize),
    #[error("singular block at site {0}")]
    BlockSingular(usize),
    #[error("degenerate flow at site {0}")]
    Degenerate(usize),
    #[error("step collapse at time {time}: particles {left} and {right} too close")]
    StepCollapse { time: f64, left: usize, right: usize },
    #[error("timeout after {0} time units")]
    Timeout(f64),
    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
