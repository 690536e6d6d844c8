use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::TclError;

/// Physical parameters of one air conditioner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadParams {
    /// Thermal resistance, degC/kW.
    pub r: f64,
    /// Thermal capacitance, kWh/degC.
    pub c: f64,
    /// Desired temperature, degC.
    pub theta_d: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Rated cooling draw, kW.
    pub p_rated: f64,
}

impl LoadParams {
    pub fn validate(&self, index: usize) -> Result<(), TclError> {
        let fail = |reason: &str| {
            Err(TclError::InvalidLoad {
                index,
                reason: reason.to_string(),
            })
        };
        if !(self.r > 0.0 && self.r.is_finite()) {
            return fail("r must be positive");
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return fail("c must be positive");
        }
        if !(self.p_rated > 0.0 && self.p_rated.is_finite()) {
            return fail("p_rated must be positive");
        }
        if !(self.theta_min < self.theta_d && self.theta_d < self.theta_max) {
            return fail("need theta_min < theta_d < theta_max");
        }
        Ok(())
    }
}

/// Closed interval `[lo, hi]`, written as a two-element array in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange(pub f64, pub f64);

impl ParamRange {
    pub fn lo(&self) -> f64 {
        self.0
    }

    pub fn hi(&self) -> f64 {
        self.1
    }

    fn validate(&self, name: &'static str, positive: bool) -> Result<(), TclError> {
        let ok = self.0.is_finite() && self.1.is_finite() && self.0 <= self.1;
        if !ok || (positive && self.0 <= 0.0) {
            return Err(TclError::InvalidRange {
                name,
                lo: self.0,
                hi: self.1,
            });
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.0 + (self.1 - self.0) * rng.random::<f64>()
    }
}

/// Uniform sampling ranges for the fleet.
///
/// The defaults describe representative residential air conditioners with
/// the compressor efficiency folded into `r` and `c`: the time constant
/// `r c` is 2.25 to 6.25 h, and `(theta_ambient - theta_d) / r` puts the
/// average power needed to hold the desired temperature near 2.4 kW per load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FleetRanges {
    pub r: ParamRange,
    pub c: ParamRange,
    pub p_rated: ParamRange,
    pub theta_d: ParamRange,
    /// Half of the deadband width, degC.
    pub half_width: ParamRange,
}

impl Default for FleetRanges {
    fn default() -> Self {
        Self {
            r: ParamRange(3.75, 6.25),
            c: ParamRange(0.6, 1.0),
            p_rated: ParamRange(4.0, 7.2),
            theta_d: ParamRange(20.0, 24.0),
            half_width: ParamRange(0.125, 0.5),
        }
    }
}

impl FleetRanges {
    pub fn validate(&self) -> Result<(), TclError> {
        self.r.validate("r", true)?;
        self.c.validate("c", true)?;
        self.p_rated.validate("p_rated", true)?;
        self.theta_d.validate("theta_d", false)?;
        self.half_width.validate("half_width", true)
    }
}

/// Draws `n` loads, each parameter independently uniform over its range.
pub fn sample_fleet<R: Rng + ?Sized>(
    n: usize,
    ranges: &FleetRanges,
    rng: &mut R,
) -> Result<Vec<LoadParams>, TclError> {
    ranges.validate()?;
    Ok((0..n)
        .map(|_| {
            let r = ranges.r.sample(rng);
            let c = ranges.c.sample(rng);
            let p_rated = ranges.p_rated.sample(rng);
            let theta_d = ranges.theta_d.sample(rng);
            let half = ranges.half_width.sample(rng);
            LoadParams {
                r,
                c,
                theta_d,
                theta_min: theta_d - half,
                theta_max: theta_d + half,
                p_rated,
            }
        })
        .collect())
}
