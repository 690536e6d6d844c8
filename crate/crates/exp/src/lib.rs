//! Experiment runner for bOGD: TCL scenario runs, Monte-Carlo replications,
//! synthetic regret validation and bound evaluation. Every command writes
//! CSV tables plus a plain-text manifest.

pub mod bounds;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod scenario;
pub mod stats;
pub mod synthetic;

pub use error::{ExpError, Result};
