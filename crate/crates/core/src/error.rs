use thiserror::Error;

/// Errors produced by model construction and the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field} out of range: got {value}, expected {expected}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// The dynamic analysis requires `lambda_a > lambda_b`; factions are not
    /// relabelled implicitly because their identities matter downstream.
    #[error("lambda_a ({lambda_a}) must not be smaller than lambda_b ({lambda_b}); factions are not relabelled")]
    RequiresLambdaOrder { lambda_a: f64, lambda_b: f64 },
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("target belief {target} exceeds the prior {prior}; the belief only falls")]
    TargetAbovePrior { target: f64, prior: f64 },
    #[error("the belief is constant when lambda_a equals lambda_b")]
    StaticBelief,
    #[error("the project can never be approved (c > 1/2 or p0 < c)")]
    NotApprovable,
    #[error("the prior is already at or below the stopping belief; approval is immediate")]
    ImmediateRegime,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grid value {value} outside {expected}")]
    GridOutOfRange { value: f64, expected: &'static str },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("time {t} exceeds the process horizon {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },
    #[error("the belief has not reached the cutoff by the horizon {horizon}; extend the horizon")]
    HorizonTooShort { horizon: f64 },
    #[error("survival ratio is not strictly decreasing on ({0}, {1})")]
    MlrViolated(f64, f64),
    #[error("invalid arrival process: {0}")]
    InvalidProcess(String),
    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;
