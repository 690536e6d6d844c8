use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::TclError;

/// How `noise_scale` parameterizes the setpoint perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// `noise_scale` is the variance of `w_t`.
    Variance,
    /// `noise_scale` is the standard deviation of `w_t`.
    Std,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    /// Base setpoint `s0`, kW.
    pub s0: f64,
    pub noise_scale: f64,
    pub noise_kind: NoiseKind,
    /// Rounds `w_t` is held before it is redrawn.
    pub hold_rounds: u32,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            s0: 2400.0,
            noise_scale: 300.0,
            noise_kind: NoiseKind::Variance,
            hold_rounds: 5,
        }
    }
}

impl SignalConfig {
    pub fn noise_std(&self) -> f64 {
        match self.noise_kind {
            NoiseKind::Variance => self.noise_scale.sqrt(),
            NoiseKind::Std => self.noise_scale,
        }
    }

    pub fn validate(&self) -> Result<(), TclError> {
        if !self.s0.is_finite() {
            return Err(TclError::InvalidConfig(format!("signal.s0 must be finite, got {}", self.s0)));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(TclError::InvalidConfig(format!(
                "signal.noise_scale must be nonnegative, got {}",
                self.noise_scale
            )));
        }
        if self.hold_rounds == 0 {
            return Err(TclError::InvalidConfig("signal.hold_rounds must be at least 1".into()));
        }
        Ok(())
    }
}

/// Setpoint `s_t = s0 + w_t` for rounds `1..=tau` (index `t - 1`).
///
/// `w` is drawn at rounds 1, 1 + hold, 1 + 2 hold, ... and held in between.
/// With zero noise no draws are taken.
pub fn generate_setpoint<R: Rng + ?Sized>(
    tau: u64,
    cfg: &SignalConfig,
    rng: &mut R,
) -> Result<Vec<f64>, TclError> {
    cfg.validate()?;
    let std = cfg.noise_std();
    let noise = if std > 0.0 {
        Some(Normal::new(0.0, std).map_err(|e| TclError::InvalidConfig(e.to_string()))?)
    } else {
        None
    };
    let hold = u64::from(cfg.hold_rounds);
    let mut w = 0.0;
    Ok((0..tau)
        .map(|k| {
            if k % hold == 0 {
                w = noise.as_ref().map_or(0.0, |d| d.sample(rng));
            }
            cfg.s0 + w
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmbientConfig {
    /// Ambient temperature at round 0, degC.
    pub base: f64,
    pub amplitude: f64,
}

impl Default for AmbientConfig {
    fn default() -> Self {
        Self {
            base: 34.0,
            amplitude: 0.25,
        }
    }
}

/// `base + amplitude sin(t pi / period)`.
pub fn generate_ambient(t: u64, period: u64, cfg: &AmbientConfig) -> f64 {
    cfg.base + cfg.amplitude * (t as f64 * std::f64::consts::PI / period as f64).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;

    #[test]
    fn ambient_profile() {
        let cfg = AmbientConfig::default();
        assert_eq!(generate_ambient(0, 200, &cfg), 34.0);
        assert!((generate_ambient(100, 200, &cfg) - 34.25).abs() < 1e-15);
        assert!((generate_ambient(200, 200, &cfg) - 34.0).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_is_constant() {
        let cfg = SignalConfig { noise_scale: 0.0, ..SignalConfig::default() };
        let s = generate_setpoint(50, &cfg, &mut rng_from_seed(0)).unwrap();
        assert!(s.iter().all(|&v| v == 2400.0));
    }

    #[test]
    fn two_holds_in_ten_rounds() {
        let s = generate_setpoint(10, &SignalConfig::default(), &mut rng_from_seed(3)).unwrap();
        let mut distinct = s.clone();
        distinct.dedup();
        assert_eq!(distinct.len(), 2);
        assert!(s[..5].iter().all(|&v| v == s[0]));
        assert!(s[5..].iter().all(|&v| v == s[5]));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = generate_setpoint(40, &SignalConfig::default(), &mut rng_from_seed(11)).unwrap();
        let b = generate_setpoint(40, &SignalConfig::default(), &mut rng_from_seed(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_reading_sets_spread() {
        let var = SignalConfig { hold_rounds: 1, ..SignalConfig::default() };
        let std = SignalConfig { noise_kind: NoiseKind::Std, ..var };
        assert!((var.noise_std() - 300f64.sqrt()).abs() < 1e-12);
        assert_eq!(std.noise_std(), 300.0);
        let m = 20_000;
        let s = generate_setpoint(m, &var, &mut rng_from_seed(4)).unwrap();
        let mean = s.iter().sum::<f64>() / m as f64;
        let v = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        assert!((v - 300.0).abs() < 15.0, "{v}");
    }

    #[test]
    fn zero_hold_is_rejected() {
        let cfg = SignalConfig { hold_rounds: 0, ..SignalConfig::default() };
        assert!(generate_setpoint(3, &cfg, &mut rng_from_seed(0)).is_err());
    }
}
