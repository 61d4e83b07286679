use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("objective evaluated to a non-finite value at x = {x}")]
    NonFiniteEvaluation { x: f64 },

    #[error("no interior peak: {0}")]
    NoInteriorPeak(String),

    #[error("no interior minimum: {0}")]
    NoInteriorMinimum(String),

    #[error("target EE {target} bit/J unachievable; max achievable EE over the range is {max_achievable} bit/J")]
    TargetUnachievable { target: f64, max_achievable: f64 },

    #[error("infeasible: {reason}; max achievable throughput within budget is {max_throughput_bps} bit/s")]
    InfeasiblePlan {
        reason: String,
        max_throughput_bps: f64,
    },

    #[error("infeasible schedule: {0}")]
    InfeasibleSchedule(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
