use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::params::LoadParams;
use super::state::FleetState;
use crate::error::TclError;

/// First-order RC model `theta' = B theta + (I - B)(theta_amb - r * power) + w`
/// with `B(i,i) = exp(-h / (r(i) c(i)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalModel {
    decay: Vec<f64>,
    resistance: Vec<f64>,
    h_hours: f64,
    noise_std: f64,
}

impl ThermalModel {
    pub fn new(loads: &[LoadParams], h_hours: f64, noise_variance: f64) -> Result<Self, TclError> {
        if !(h_hours > 0.0 && h_hours.is_finite()) {
            return Err(TclError::InvalidConfig(format!(
                "round duration h must be positive, got {h_hours}"
            )));
        }
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(TclError::InvalidConfig(format!(
                "thermal noise variance must be nonnegative, got {noise_variance}"
            )));
        }
        for (i, l) in loads.iter().enumerate() {
            l.validate(i)?;
        }
        Ok(Self {
            decay: loads.iter().map(|l| (-h_hours / (l.r * l.c)).exp()).collect(),
            resistance: loads.iter().map(|l| l.r).collect(),
            h_hours,
            noise_std: noise_variance.sqrt(),
        })
    }

    /// Diagonal of `B`.
    pub fn decay(&self) -> &[f64] {
        &self.decay
    }

    pub fn resistance(&self) -> &[f64] {
        &self.resistance
    }

    pub fn h_hours(&self) -> f64 {
        self.h_hours
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn len(&self) -> usize {
        self.decay.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decay.is_empty()
    }

    /// Noise-free one-step prediction for load `i`.
    pub fn predict(&self, i: usize, theta: f64, ambient: f64, power: f64) -> f64 {
        let b = self.decay[i];
        b * theta + (1.0 - b) * (ambient - self.resistance[i] * power)
    }

    /// Advances every temperature by one round under `dispatch`, where load
    /// `i` draws `p(i) dispatch(i) + p_tilde(i) u(i)`. Noise is drawn from
    /// `rng` in load order, one draw per load, unless the noise is disabled.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: &FleetState,
        dispatch: &[f64],
        ambient: f64,
        rng: &mut R,
    ) -> Result<Vec<f64>, TclError> {
        let n = self.len();
        for len in [state.theta.len(), dispatch.len()] {
            if len != n {
                return Err(TclError::DimensionMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        let power = state.effective_power(dispatch);
        let noise = if self.noise_std > 0.0 {
            Some(Normal::new(0.0, self.noise_std).expect("finite std"))
        } else {
            None
        };
        Ok((0..n)
            .map(|i| {
                let next = self.predict(i, state.theta[i], ambient, power[i]);
                match &noise {
                    Some(d) => next + d.sample(rng),
                    None => next,
                }
            })
            .collect())
    }
}
