//! Fleet of air conditioners dispatched by bOGD to track a power setpoint.

pub mod config;
pub mod loss;
pub mod metrics;
pub mod params;
pub mod signal;
pub mod sim;
pub mod state;
pub mod thermal;

pub use config::{
    AlgorithmConfig, AnalysisConfig, InitialDecision, OverrideConfig, RunConfig, ScenarioConfig,
    Seeds, ThermalConfig,
};
pub use loss::{RoundInputs, TclLoss};
pub use metrics::{tracking_metrics, TrackingMetrics};
pub use params::{sample_fleet, FleetRanges, LoadParams, ParamRange};
pub use signal::{generate_ambient, generate_setpoint, AmbientConfig, NoiseKind, SignalConfig};
pub use sim::{Dispatch, RoundRecord, RunRecord, Scenario};
pub use state::{Availability, AvailabilityRules, FleetState};
pub use thermal::ThermalModel;
