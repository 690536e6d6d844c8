use super::params::LoadParams;
use super::state::FleetState;
use super::thermal::ThermalModel;
use crate::error::TclError;
use crate::loss::{norm1, norm2, LossOracle};
use crate::oco::RelaxedDecision;

/// What the aggregator observes for round `t` before computing its update.
#[derive(Debug, Clone, Copy)]
pub struct RoundInputs<'a> {
    /// 1-based round `t`.
    pub round: u64,
    pub setpoint: f64,
    pub ambient: f64,
    /// Carries `theta_{t-1}`, the mean up to `t-1`, and this round's `p`,
    /// `p_tilde`, `u`.
    pub state: &'a FleetState,
    pub model: &'a ThermalModel,
    pub loads: &'a [LoadParams],
    pub rho: f64,
    pub lambda: f64,
}

/// Setpoint-tracking round loss
///
/// `f(x) = (s - p^T x - p_tilde^T u)^2 + lambda ||x||_1 + rho/2 ||v(x)||^2`
///
/// where `v(x) = ((t-1)/t) <theta>_{t-1} + (1/t)(B theta_{t-1} + (I - B)(1 theta_amb
/// - diag(r) diag(p) x)) - theta_d` is affine in `x` with a diagonal slope.
///
/// [`LossOracle::gradient`] leaves out the `lambda` term, which the proximal
/// update handles.
#[derive(Debug, Clone, PartialEq)]
pub struct TclLoss {
    /// `s - p_tilde^T u`.
    residual_setpoint: f64,
    uncontrollable: f64,
    p: Vec<f64>,
    /// `v(0)`.
    offset: Vec<f64>,
    /// Diagonal of `dv/dx`, `-(1/t)(1 - B(i,i)) r(i) p(i)`.
    slope: Vec<f64>,
    rho: f64,
    lambda: f64,
}

impl TclLoss {
    pub fn new(inputs: &RoundInputs<'_>) -> Result<Self, TclError> {
        if inputs.round == 0 {
            return Err(TclError::ZeroRound);
        }
        let n = inputs.loads.len();
        let state = inputs.state;
        for len in [state.len(), inputs.model.len()] {
            if len != n {
                return Err(TclError::DimensionMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        let t = inputs.round as f64;
        let w_prev = (t - 1.0) / t;
        let b = inputs.model.decay();
        let r = inputs.model.resistance();
        let offset = (0..n)
            .map(|i| {
                let free = b[i] * state.theta[i] + (1.0 - b[i]) * inputs.ambient;
                w_prev * state.mean_theta[i] + free / t - inputs.loads[i].theta_d
            })
            .collect();
        let slope = (0..n)
            .map(|i| -(1.0 - b[i]) * r[i] * state.p[i] / t)
            .collect();
        let uncontrollable = state.uncontrollable_power();
        Ok(Self {
            residual_setpoint: inputs.setpoint - uncontrollable,
            uncontrollable,
            p: state.p.clone(),
            offset,
            slope,
            rho: inputs.rho,
            lambda: inputs.lambda,
        })
    }

    /// `p_tilde^T u`.
    pub fn uncontrollable(&self) -> f64 {
        self.uncontrollable
    }

    /// `s - p^T x - p_tilde^T u`.
    pub fn tracking_error(&self, x: &[f64]) -> f64 {
        self.residual_setpoint - self.p.iter().zip(x).map(|(p, x)| p * x).sum::<f64>()
    }

    /// Exact minimizer over `[0,1]^n` of the full loss, `lambda` term included.
    ///
    /// For a multiplier `mu` standing in for `2(s - p^T x - p_tilde^T u)` the
    /// problem separates per load, each coordinate being a clipped linear
    /// function of `mu`. The consistent `mu` is the root of a strictly
    /// increasing scalar function and is found by bisection. Returns `None`
    /// when `rho = 0`, where the separable form degenerates.
    pub fn relaxed_optimum(&self) -> Option<(RelaxedDecision, f64)> {
        if !(self.rho > 0.0) {
            return None;
        }
        let coord = |i: usize, mu: f64| -> f64 {
            let curvature = self.rho * self.slope[i] * self.slope[i];
            if curvature > 0.0 {
                ((mu * self.p[i] - self.lambda - self.rho * self.slope[i] * self.offset[i])
                    / curvature)
                    .clamp(0.0, 1.0)
            } else {
                // p(i) = 0: x(i) only pays lambda.
                0.0
            }
        };
        let n = self.p.len();
        let excess = |mu: f64| -> f64 {
            let y: f64 = (0..n).map(|i| self.p[i] * coord(i, mu)).sum();
            mu - 2.0 * (self.residual_setpoint - y)
        };
        let total: f64 = self.p.iter().sum();
        let mut lo = 2.0 * (self.residual_setpoint - total);
        let mut hi = 2.0 * self.residual_setpoint;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu = 0.5 * (lo + hi);
        let x: Vec<f64> = (0..n).map(|i| coord(i, mu)).collect();
        let value = self.evaluate(&x);
        Some((RelaxedDecision::new(x).expect("clamped to the box"), value))
    }

    fn gradient_bounds(&self) -> (f64, f64) {
        let total: f64 = self.p.iter().sum();
        let max_track = self
            .residual_setpoint
            .abs()
            .max((self.residual_setpoint - total).abs());
        let temp: Vec<f64> = self
            .slope
            .iter()
            .zip(&self.offset)
            .map(|(d, v)| self.rho * d.abs() * v.abs().max((v + d).abs()))
            .collect();
        let n = self.p.len() as f64;
        (
            2.0 * max_track * norm1(&self.p) + norm1(&temp) + n * self.lambda,
            2.0 * max_track * norm2(&self.p) + norm2(&temp) + n.sqrt() * self.lambda,
        )
    }
}

impl LossOracle for TclLoss {
    fn dim(&self) -> usize {
        self.p.len()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let e = self.tracking_error(x);
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        let temp: f64 = self
            .offset
            .iter()
            .zip(&self.slope)
            .zip(x)
            .map(|((v, d), x)| (v + d * x).powi(2))
            .sum();
        e * e + self.lambda * l1 + 0.5 * self.rho * temp
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let e = self.tracking_error(x);
        self.p
            .iter()
            .zip(&self.offset)
            .zip(&self.slope)
            .zip(x)
            .map(|(((p, v), d), x)| -2.0 * e * p + self.rho * d * (v + d * x))
            .collect()
    }

    /// Bound for the complete loss, `lambda` term included, from the triangle
    /// inequality with each piece maximized over the box.
    fn lipschitz_l1(&self) -> f64 {
        self.gradient_bounds().0
    }

    fn lipschitz_l2(&self) -> f64 {
        self.gradient_bounds().1
    }

    fn l1_weight(&self) -> f64 {
        self.lambda
    }
}
