//! Binary online gradient descent (bOGD).
//!
//! Online convex optimization over `{0,1}^n`: a proximal gradient step on the
//! relaxed box `[0,1]^n` followed by independent Bernoulli rounding of every
//! coordinate. The crate is split into
//!
//! - [`oco`]: decision types, the closed-form proximal update, the randomizer
//!   and the restart schedule,
//! - [`loss`]: the [`LossOracle`] interface plus linear and quadratic losses,
//! - [`regret`]: hindsight optima, regret bookkeeping, cumulative variation and
//!   closed-form regret bounds,
//! - [`tcl`]: a thermostatically controlled load fleet dispatched by bOGD to
//!   track a power setpoint.

pub mod error;
pub mod loss;
pub mod oco;
pub mod regret;
pub mod tcl;

pub use error::{OcoError, RegretError, TclError};
pub use loss::{full_gradient, LinearLoss, LossOracle, QuadraticLoss};
pub use oco::{
    bogd_step, prox_update, randomize, run_with_restarts, BinaryDecision, Bogd, RelaxedDecision,
    RestartSchedule, StepConfig, TrajectoryPoint,
};

/// Deterministic random stream used throughout the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds the random stream for a named seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}
