use std::path::Path;

use bogd::tcl::{
    AlgorithmConfig, AmbientConfig, AnalysisConfig, FleetRanges, OverrideConfig, RunConfig,
    ScenarioConfig, Seeds, SignalConfig, ThermalConfig,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

/// Which seeds change from one replication to the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vary {
    Randomization,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReplicationConfig {
    pub count: usize,
    pub vary: Vary,
}

impl Default for ReplicationConfig {
    fn default() -> Self {
        Self {
            count: 100,
            vary: Vary::Randomization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Loads whose temperatures are written to the time series.
    pub tracked_loads: Vec<usize>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            tracked_loads: vec![0, 1, 2],
        }
    }
}

/// A TCL scenario file: the simulator sections plus output and replication
/// settings.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run: RunConfig,
    pub signal: SignalConfig,
    pub ambient: AmbientConfig,
    pub thermal: ThermalConfig,
    pub algorithm: AlgorithmConfig,
    pub manual_override: OverrideConfig,
    pub fleet: FleetRanges,
    pub seeds: Seeds,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
    pub replication: ReplicationConfig,
}

impl ExperimentConfig {
    pub fn scenario(&self) -> ScenarioConfig {
        ScenarioConfig {
            run: self.run,
            signal: self.signal,
            ambient: self.ambient,
            thermal: self.thermal,
            algorithm: self.algorithm,
            manual_override: self.manual_override,
            fleet: self.fleet,
            seeds: self.seeds,
            analysis: self.analysis,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario().validate()?;
        if self.replication.count == 0 {
            return Err(ExpError::Config("replication.count must be at least 1".into()));
        }
        if let Some(&i) = self.output.tracked_loads.iter().find(|&&i| i >= self.run.n) {
            return Err(ExpError::Config(format!(
                "output.tracked_loads entry {i} is out of range for run.n = {}",
                self.run.n
            )));
        }
        Ok(())
    }

    pub fn apply_seed_overrides(&mut self, overrides: &[(String, u64)]) -> Result<()> {
        for (name, value) in overrides {
            self.seeds.set(name, *value)?;
        }
        Ok(())
    }
}

/// Shape of the synthetic loss sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticKind {
    /// One quadratic for every round.
    Static,
    /// Quadratic whose center oscillates with a decaying amplitude.
    Drifting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: SyntheticKind,
    pub n: usize,
    pub tau: u64,
    pub restart_block: u64,
    pub a: f64,
    /// Ridge added to the random Gram matrix.
    pub curvature: f64,
    /// Scale of the random Gram matrix part of the Hessian.
    pub coupling: f64,
    /// Initial amplitude of the center oscillation.
    pub drift_amplitude: f64,
    /// Decay time of the oscillation amplitude, rounds.
    pub drift_settle: f64,
    /// Period of the oscillation, rounds.
    pub drift_period: f64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            kind: SyntheticKind::Drifting,
            n: 8,
            tau: 400,
            restart_block: 100,
            a: 1.0,
            curvature: 1.0,
            coupling: 0.2,
            drift_amplitude: 3.0,
            drift_settle: 40.0,
            drift_period: 16.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSeeds {
    /// Draws the Hessian, base centers and phases.
    pub problem: u64,
    /// Base of the randomization seeds; replication `k` uses `randomization + k`.
    pub randomization: u64,
}

impl Default for SyntheticSeeds {
    fn default() -> Self {
        Self {
            problem: 7,
            randomization: 1,
        }
    }
}

impl SyntheticSeeds {
    pub fn set(&mut self, name: &str, value: u64) -> Result<()> {
        match name {
            "problem" => self.problem = value,
            "randomization" => self.randomization = value,
            _ => {
                return Err(ExpError::Config(format!(
                    "unknown seed '{name}', expected one of problem, randomization"
                )))
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticReplication {
    pub count: usize,
}

impl Default for SyntheticReplication {
    fn default() -> Self {
        Self { count: 100 }
    }
}

/// A synthetic regret-validation file.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub problem: ProblemConfig,
    pub seeds: SyntheticSeeds,
    pub replication: SyntheticReplication,
    pub analysis: AnalysisConfig,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        let bad = |m: String| Err(ExpError::Config(m));
        if p.n == 0 {
            return bad("problem.n must be at least 1".into());
        }
        if p.n > self.analysis.binary_optimum_cap {
            return bad(format!(
                "problem.n = {} exceeds analysis.binary_optimum_cap = {}",
                p.n, self.analysis.binary_optimum_cap
            ));
        }
        if p.tau == 0 || p.restart_block == 0 {
            return bad("problem.tau and problem.restart_block must be at least 1".into());
        }
        if !(p.a > 0.0 && p.a.is_finite()) {
            return bad(format!("problem.a must be positive, got {}", p.a));
        }
        if !(p.curvature > 0.0 && p.curvature.is_finite()) {
            return bad(format!("problem.curvature must be positive, got {}", p.curvature));
        }
        if !(p.coupling >= 0.0 && p.coupling.is_finite()) {
            return bad(format!("problem.coupling must be nonnegative, got {}", p.coupling));
        }
        if !(p.drift_settle > 0.0 && p.drift_period > 0.0 && p.drift_amplitude.is_finite()) {
            return bad("problem.drift_settle and problem.drift_period must be positive".into());
        }
        if self.replication.count == 0 {
            return bad("replication.count must be at least 1".into());
        }
        Ok(())
    }
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| ExpError::io(path, e))?;
    parse(&text).map_err(|e| match e {
        ExpError::Config(m) => ExpError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| ExpError::Config(e.message().replace('\n', " ")))
}

/// Canonical text of a configuration, used for hashing.
pub fn canonical<T: Serialize>(cfg: &T) -> String {
    toml::to_string(cfg).expect("configuration serializes")
}

/// Parses `name=int`.
pub fn parse_seed_override(s: &str) -> std::result::Result<(String, u64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=int, got '{s}'"))?;
    let value = value
        .trim()
        .parse::<u64>()
        .map_err(|e| format!("seed '{name}': {e}"))?;
    Ok((name.trim().to_string(), value))
}
