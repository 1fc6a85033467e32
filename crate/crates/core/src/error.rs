use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("amount would be negative: {0}")]
    NegativeMoney(String),

    #[error("amount must be strictly positive")]
    ZeroAmount,

    #[error("invalid amount {input:?}: {reason}")]
    ParseAmount { input: String, reason: &'static str },

    #[error("invalid ratio {input:?}: {reason}")]
    ParseRatio { input: String, reason: &'static str },

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid strategy {0:?}: expected always-switch, never-switch, random:<p> or naive-bayesian")]
    ParseStrategy(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("simulation resources exhausted: {0}")]
    ResourceExhausted(String),
}
