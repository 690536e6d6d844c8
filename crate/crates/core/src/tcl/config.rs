use serde::{Deserialize, Serialize};

use super::params::FleetRanges;
use super::signal::{AmbientConfig, SignalConfig};
use super::state::AvailabilityRules;
use crate::error::TclError;
use crate::regret::DEFAULT_ENUMERATION_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Fleet size.
    pub n: usize,
    /// Total rounds.
    pub tau: u64,
    /// Restart block length `T`; the step size is `a / sqrt(T)`.
    pub restart_block: u64,
    /// Round duration in hours.
    pub h_hours: f64,
    /// Compressor lockout in minutes.
    pub lockout_minutes: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            tau: 200,
            restart_block: 200,
            h_hours: 1.0 / 60.0,
            lockout_minutes: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalConfig {
    /// Variance of the per-round temperature noise, degC^2.
    pub noise_variance: f64,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        Self { noise_variance: 0.025 }
    }
}

/// Starting relaxed iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDecision {
    /// Independent fair coin per load.
    RandomBinary,
    /// Every coordinate at 0.5.
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub a: f64,
    pub lambda: f64,
    /// Weight of the mean-temperature term.
    pub rho: f64,
    pub initial: InitialDecision,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            a: 4e-4,
            lambda: 250.0,
            rho: 500.0,
            initial: InitialDecision::RandomBinary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverrideConfig {
    pub probability: f64,
    pub duration_rounds: u32,
}

impl Default for OverrideConfig {
    fn default() -> Self {
        Self {
            probability: 0.0,
            duration_rounds: 1,
        }
    }
}

/// One seed per random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub randomization: u64,
    pub thermal_noise: u64,
    pub setpoint: u64,
    pub fleet: u64,
    pub manual_override: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self {
            randomization: 1,
            thermal_noise: 2,
            setpoint: 3,
            fleet: 4,
            manual_override: 5,
        }
    }
}

impl Seeds {
    pub const NAMES: [&'static str; 5] =
        ["randomization", "thermal_noise", "setpoint", "fleet", "manual_override"];

    pub fn get(&self, name: &str) -> Option<u64> {
        Some(match name {
            "randomization" => self.randomization,
            "thermal_noise" => self.thermal_noise,
            "setpoint" => self.setpoint,
            "fleet" => self.fleet,
            "manual_override" => self.manual_override,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: u64) -> Result<(), TclError> {
        let slot = match name {
            "randomization" => &mut self.randomization,
            "thermal_noise" => &mut self.thermal_noise,
            "setpoint" => &mut self.setpoint,
            "fleet" => &mut self.fleet,
            "manual_override" => &mut self.manual_override,
            _ => {
                return Err(TclError::InvalidConfig(format!(
                    "unknown seed '{name}', expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// Named seeds in a fixed order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, u64)> + '_ {
        Self::NAMES.iter().map(move |&n| (n, self.get(n).expect("known name")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Largest fleet for which binary round optima are enumerated.
    pub binary_optimum_cap: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            binary_optimum_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub run: RunConfig,
    pub signal: SignalConfig,
    pub ambient: AmbientConfig,
    pub thermal: ThermalConfig,
    pub algorithm: AlgorithmConfig,
    pub manual_override: OverrideConfig,
    pub fleet: FleetRanges,
    pub seeds: Seeds,
    pub analysis: AnalysisConfig,
}

impl ScenarioConfig {
    /// Lockout length `K = M / (60 h)`, which must be a positive integer up
    /// to `1e-9`.
    pub fn lockout_rounds(&self) -> Result<u32, TclError> {
        let m = self.run.lockout_minutes;
        let h = self.run.h_hours;
        let value = m / (60.0 * h);
        let rounded = value.round();
        if !value.is_finite() || rounded < 1.0 || (value - rounded).abs() > 1e-9 || rounded > u32::MAX as f64 {
            return Err(TclError::NonIntegerLockout {
                value,
                minutes: m,
                h_hours: h,
            });
        }
        Ok(rounded as u32)
    }

    pub fn availability_rules(&self) -> Result<AvailabilityRules, TclError> {
        Ok(AvailabilityRules {
            lockout_rounds: self.lockout_rounds()?,
            override_probability: self.manual_override.probability,
            override_duration: self.manual_override.duration_rounds,
        })
    }

    pub fn validate(&self) -> Result<(), TclError> {
        let bad = |msg: String| Err(TclError::InvalidConfig(msg));
        let run = &self.run;
        if run.n == 0 {
            return bad("run.n must be at least 1".into());
        }
        if run.tau == 0 {
            return bad("run.tau must be at least 1".into());
        }
        if run.restart_block == 0 {
            return bad("run.restart_block must be at least 1".into());
        }
        if !(run.h_hours > 0.0 && run.h_hours.is_finite()) {
            return bad(format!("run.h_hours must be positive, got {}", run.h_hours));
        }
        if !(run.lockout_minutes > 0.0 && run.lockout_minutes.is_finite()) {
            return bad(format!("run.lockout_minutes must be positive, got {}", run.lockout_minutes));
        }
        self.lockout_rounds()?;
        self.signal.validate()?;
        if !(self.ambient.base.is_finite() && self.ambient.amplitude.is_finite()) {
            return bad("ambient.base and ambient.amplitude must be finite".into());
        }
        let v = self.thermal.noise_variance;
        if !(v >= 0.0 && v.is_finite()) {
            return bad(format!("thermal.noise_variance must be nonnegative, got {v}"));
        }
        let alg = &self.algorithm;
        if !(alg.a > 0.0 && alg.a.is_finite()) {
            return bad(format!("algorithm.a must be positive, got {}", alg.a));
        }
        if !(alg.lambda >= 0.0 && alg.lambda.is_finite()) {
            return bad(format!("algorithm.lambda must be nonnegative, got {}", alg.lambda));
        }
        if !(alg.rho >= 0.0 && alg.rho.is_finite()) {
            return bad(format!("algorithm.rho must be nonnegative, got {}", alg.rho));
        }
        let p = self.manual_override.probability;
        if !(0.0..=1.0).contains(&p) {
            return bad(format!("manual_override.probability must lie in [0, 1], got {p}"));
        }
        if self.manual_override.duration_rounds == 0 {
            return bad("manual_override.duration_rounds must be at least 1".into());
        }
        self.fleet.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_with_five_round_lockout() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.lockout_rounds().unwrap(), 5);
    }

    #[test]
    fn non_integer_lockout_is_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.run.lockout_minutes = 4.5;
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, TclError::NonIntegerLockout { .. }));
        assert!(err.to_string().contains("K = M/(60h)"));
        cfg.run.lockout_minutes = 5.0;
        cfg.run.h_hours = 2.0 / 60.0;
        assert!(cfg.validate().is_err());
        cfg.run.h_hours = 0.5 / 60.0;
        assert_eq!(cfg.lockout_rounds().unwrap(), 10);
    }

    #[test]
    fn seeds_by_name() {
        let mut s = Seeds::default();
        s.set("fleet", 99).unwrap();
        assert_eq!(s.get("fleet"), Some(99));
        assert!(s.set("bogus", 1).is_err());
        assert_eq!(s.iter().count(), 5);
    }

    #[test]
    fn invalid_fields_are_reported() {
        let mut cfg = ScenarioConfig::default();
        cfg.manual_override.probability = 1.5;
        assert!(cfg.validate().unwrap_err().to_string().contains("manual_override.probability"));
        let mut cfg = ScenarioConfig::default();
        cfg.run.n = 0;
        assert!(cfg.validate().unwrap_err().to_string().contains("run.n"));
    }
}
