use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("blow-up: |n| = {value:e} at node {node}")]
    BlowUp { node: usize, value: f64 },

    #[error("stability guard: {0}")]
    StabilityGuard(String),

    #[error("newton did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular jacobian (pivot {pivot:e} at row {row})")]
    SingularJacobian { row: usize, pivot: f64 },

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config: {0}")]
    ConfigValue(String),

    #[error("failed criteria: {0:?}")]
    Verification(Vec<usize>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the binary: 2 for configuration problems,
    /// 3 for everything the solvers report.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigParse { .. } | Error::ConfigValue(_) => 2,
            _ => 3,
        }
    }
}
