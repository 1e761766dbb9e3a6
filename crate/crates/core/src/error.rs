use thiserror::Error;

use crate::restarts::RestartReport;
use crate::solvers::RunResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("no feasible point found while computing the reference optimum (best residual {residual:e})")]
    InfeasibleReference { residual: f64 },

    /// A non-productive step met a constraint with a zero subgradient while the
    /// constraint value is above the tolerance: the constraint's minimum over
    /// the whole space exceeds `eps`.
    #[error("constraint {constraint} has zero subgradient at step {step} with value {value} > eps")]
    InfeasibilityCertificate {
        step: u64,
        constraint: usize,
        value: f64,
    },

    /// The partially adaptive method finished its fixed budget without a single
    /// productive step. Theory rules this out, so the problem data (usually
    /// `M_g`) is wrong.
    #[error("no productive steps after {} iterations; check the constraint Lipschitz constant", .0.iterations)]
    NoProductiveSteps(Box<RunResult>),

    #[error("restart {} stopped at the inner iteration cap", .0.chain.len())]
    RestartCapped(Box<RestartReport>),

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("fixture not found: {}", .0.display())]
    MissingFixture(std::path::PathBuf),

    #[error("malformed fixture: {0}")]
    Fixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
