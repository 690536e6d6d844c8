use thiserror::Error;

use crate::oco::RelaxedDecision;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OcoError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("entry {index} = {value} lies outside [0, 1]")]
    OutOfBox { index: usize, value: f64 },
    #[error("gradient entry {index} is not finite ({value})")]
    NonFiniteGradient { index: usize, value: f64 },
    #[error("invalid step configuration: {0}")]
    InvalidStep(String),
    #[error("invalid restart schedule: {0}")]
    InvalidSchedule(String),
    #[error("oracle stream is empty")]
    EmptyStream,
    #[error("oracle stream ended at round {round} before the horizon {horizon}")]
    StreamExhausted { round: u64, horizon: u64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegretError {
    #[error(
        "dimension {n} exceeds the enumeration cap {cap}; use the relaxed optimum as a bound instead"
    )]
    EnumerationCap { n: usize, cap: usize },
    #[error("relaxed solver stopped after {iterations} iterations with residual {residual:e}")]
    NotConverged {
        best: RelaxedDecision,
        value: f64,
        residual: f64,
        iterations: usize,
    },
    #[error("invalid bound input: {0}")]
    InvalidInput(String),
    #[error("T = {block} violates the requirement T <= (a*L1)^2 = {limit}")]
    HorizonTooLong { block: u64, limit: f64 },
    #[error("round {round}: relaxed optimum {relaxed} exceeds binary optimum {binary}")]
    RelaxationDominance {
        round: usize,
        relaxed: f64,
        binary: f64,
    },
    #[error(transparent)]
    Oco(#[from] OcoError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TclError {
    #[error("invalid load parameters for load {index}: {reason}")]
    InvalidLoad { index: usize, reason: String },
    #[error("invalid range for {name}: [{lo}, {hi}]")]
    InvalidRange { name: &'static str, lo: f64, hi: f64 },
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("lockout rounds K = M/(60h) = {value} is not a positive integer (M = {minutes} min, h = {h_hours} h)")]
    NonIntegerLockout {
        value: f64,
        minutes: f64,
        h_hours: f64,
    },
    #[error("loss is undefined at round 0")]
    ZeroRound,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Oco(#[from] OcoError),
    #[error(transparent)]
    Regret(#[from] RegretError),
}
