//! Regret bookkeeping, hindsight round optima and closed-form regret bounds.

use rand::Rng;
use rayon::prelude::*;

use crate::error::RegretError;
use crate::loss::{full_gradient, norm1, norm2, LossOracle};
use crate::oco::{restart_epsilon, BinaryDecision, RelaxedDecision};

/// Default largest `n` for exhaustive binary enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Default stationarity tolerance of the relaxed solver.
pub const DEFAULT_RELAXED_TOL: f64 = 1e-8;

pub const DEFAULT_MAX_ITERATIONS: usize = 200_000;

/// Consecutive accepted steps without a decrease above rounding level after
/// which the relaxed solver stops.
const STALL_LIMIT: usize = 200;

/// Absolute slack (relative to the loss scale) allowed when checking
/// `f(x*) <= f(b*)` on numerically computed optima.
pub const DOMINANCE_TOL: f64 = 1e-9;

/// Exhaustive minimizer over `{0,1}^n`. Ties go to the smallest little-endian
/// code.
pub fn binary_round_optimum<L>(oracle: &L, cap: usize) -> Result<(BinaryDecision, f64), RegretError>
where
    L: LossOracle + Sync + ?Sized,
{
    let n = oracle.dim();
    if n > cap || n >= 64 {
        return Err(RegretError::EnumerationCap { n, cap });
    }
    // Ordering by (value, code) makes the reduction independent of how rayon
    // splits the range.
    let pick = |a: (f64, u64), b: (f64, u64)| {
        if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let (value, code) = (0u64..(1u64 << n))
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |x, code| {
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = ((code >> i) & 1) as f64;
                }
                (oracle.evaluate(x), code)
            },
        )
        .reduce(|| (f64::INFINITY, u64::MAX), pick);
    Ok((BinaryDecision::from_code(code, n), value))
}

fn project_box(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Minimizer of a convex loss over `[0,1]^n` by projected gradient descent with
/// backtracking, stopped once `||x - P(x - grad f(x))||_2 <= tol` or once the loss stops
/// decreasing above its rounding level.
pub fn relaxed_round_optimum<L>(oracle: &L, tol: f64) -> Result<(RelaxedDecision, f64), RegretError>
where
    L: LossOracle + ?Sized,
{
    relaxed_round_optimum_capped(oracle, tol, DEFAULT_MAX_ITERATIONS)
}

pub fn relaxed_round_optimum_capped<L>(
    oracle: &L,
    tol: f64,
    max_iterations: usize,
) -> Result<(RelaxedDecision, f64), RegretError>
where
    L: LossOracle + ?Sized,
{
    if !(tol > 0.0) {
        return Err(RegretError::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    let n = oracle.dim();
    let mut x = vec![0.5; n];
    let mut fx = oracle.evaluate(&x);
    let mut step = 1.0f64;
    let mut residual = f64::INFINITY;
    let mut stalled = 0usize;
    for iteration in 0..max_iterations {
        let g = full_gradient(oracle, &x);
        residual = x
            .iter()
            .zip(&g)
            .map(|(xi, gi)| (xi - project_box(xi - gi)).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol {
            return Ok((RelaxedDecision::new(x)?, fx));
        }
        loop {
            let z: Vec<f64> = x
                .iter()
                .zip(&g)
                .map(|(xi, gi)| project_box(xi - step * gi))
                .collect();
            let fz = oracle.evaluate(&z);
            let (mut lin, mut sq) = (0.0, 0.0);
            for ((zi, xi), gi) in z.iter().zip(&x).zip(&g) {
                let d = zi - xi;
                lin += gi * d;
                sq += d * d;
            }
            let slack = 1e-15 * (1.0 + fx.abs());
            if fz <= fx + lin + sq / (2.0 * step) + slack {
                // Progress below the rounding level of `f` means the iterate
                // is as good as double precision allows.
                stalled = if fx - fz <= 4.0 * slack { stalled + 1 } else { 0 };
                x = z;
                fx = fz;
                if stalled >= STALL_LIMIT {
                    return Ok((RelaxedDecision::new(x)?, fx));
                }
                step = (step * 2.0).min(1e12);
                break;
            }
            step *= 0.5;
            if step < 1e-30 {
                return Err(RegretError::NotConverged {
                    best: RelaxedDecision::new(x)?,
                    value: fx,
                    residual,
                    iterations: iteration,
                });
            }
        }
    }
    Err(RegretError::NotConverged {
        best: RelaxedDecision::new(x)?,
        value: fx,
        residual,
        iterations: max_iterations,
    })
}

/// Running cumulative variation `V = sum ||x*_{t+1} - x*_t||_2`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariationTracker {
    previous: Option<RelaxedDecision>,
    total: f64,
}

impl VariationTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn previous(&self) -> Option<&RelaxedDecision> {
        self.previous.as_ref()
    }

    /// Adds the distance from the previous optimum; the first call only stores
    /// the optimum.
    pub fn update(&mut self, optimum: RelaxedDecision) -> Result<(), RegretError> {
        if let Some(prev) = &self.previous {
            if prev.len() != optimum.len() {
                return Err(crate::error::OcoError::DimensionMismatch {
                    expected: prev.len(),
                    actual: optimum.len(),
                }
                .into());
            }
            let step: f64 = prev
                .as_slice()
                .iter()
                .zip(optimum.as_slice())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            self.total += step;
        }
        self.previous = Some(optimum);
        Ok(())
    }
}

/// Per-round loss values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretRecord {
    /// `f_t(x_hat_t)`.
    pub loss_binary: f64,
    /// `f_t(x_t)`.
    pub loss_relaxed: f64,
    /// `f_t(b*_t)`, absent when enumeration was skipped.
    pub binary_optimum: Option<f64>,
    /// `f_t(x*_t)`.
    pub relaxed_optimum: Option<f64>,
}

/// Cumulative regrets after some round.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CumulativeRegret {
    /// `sum f(x_hat) - f(b*)`.
    pub dynamic: Option<f64>,
    /// `sum f(x) - f(x*)`.
    pub relaxed: Option<f64>,
    /// `sum f(x_hat) - f(x*)`, an upper bound on `dynamic`.
    pub relaxed_proxy: Option<f64>,
    /// `sum |f(x_hat) - f(x)|`.
    pub rounding: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegretLedger {
    records: Vec<RegretRecord>,
}

impl RegretLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a round, rejecting records where the relaxed optimum loses to
    /// the binary one beyond numerical tolerance.
    pub fn push(&mut self, record: RegretRecord) -> Result<(), RegretError> {
        if let (Some(binary), Some(relaxed)) = (record.binary_optimum, record.relaxed_optimum) {
            if relaxed > binary + DOMINANCE_TOL * (1.0 + binary.abs()) {
                return Err(RegretError::RelaxationDominance {
                    round: self.records.len() + 1,
                    relaxed,
                    binary,
                });
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[RegretRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Running totals after each round.
    pub fn cumulative(&self) -> Vec<CumulativeRegret> {
        let mut acc = CumulativeRegret {
            dynamic: Some(0.0),
            relaxed: Some(0.0),
            relaxed_proxy: Some(0.0),
            rounding: 0.0,
        };
        self.records
            .iter()
            .map(|r| {
                acc.dynamic = acc
                    .dynamic
                    .zip(r.binary_optimum)
                    .map(|(s, b)| s + (r.loss_binary - b));
                acc.relaxed = acc
                    .relaxed
                    .zip(r.relaxed_optimum)
                    .map(|(s, x)| s + (r.loss_relaxed - x));
                acc.relaxed_proxy = acc
                    .relaxed_proxy
                    .zip(r.relaxed_optimum)
                    .map(|(s, x)| s + (r.loss_binary - x));
                acc.rounding += (r.loss_binary - r.loss_relaxed).abs();
                acc
            })
            .collect()
    }

    pub fn totals(&self) -> CumulativeRegret {
        self.cumulative().last().copied().unwrap_or(CumulativeRegret {
            dynamic: Some(0.0),
            relaxed: Some(0.0),
            relaxed_proxy: Some(0.0),
            rounding: 0.0,
        })
    }

    pub fn dynamic_regret(&self) -> Option<f64> {
        self.totals().dynamic
    }

    pub fn relaxed_regret(&self) -> Option<f64> {
        self.totals().relaxed
    }

    pub fn relaxed_proxy_regret(&self) -> Option<f64> {
        self.totals().relaxed_proxy
    }

    pub fn rounding_error(&self) -> f64 {
        self.totals().rounding
    }
}

/// Inputs of the closed-form regret bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub a: f64,
    pub l1: f64,
    pub l2: f64,
    pub tau: u64,
    /// Constrained horizon `T`.
    pub block: u64,
    /// Cumulative variation `V`.
    pub variation: f64,
}

impl BoundInputs {
    fn validate(&self) -> Result<(), RegretError> {
        let bad = |what: String| Err(RegretError::InvalidInput(what));
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        for (name, v) in [("L1", self.l1), ("L2", self.l2), ("V", self.variation)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if self.tau == 0 || self.block == 0 {
            return bad("tau and T must be at least 1".into());
        }
        Ok(())
    }

    fn check_constrained_horizon(&self) -> Result<(), RegretError> {
        let limit = (self.a * self.l1).powi(2);
        if (self.block as f64) > limit {
            return Err(RegretError::HorizonTooLong {
                block: self.block,
                limit,
            });
        }
        Ok(())
    }

    fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    fn lemma3_coefficient(&self) -> f64 {
        let n = self.n as f64;
        n / (2.0 * self.a) + self.a * self.l2 * self.l2 / 2.0 + self.a * self.l1 * self.l2 * self.sqrt_n() / 2.0
    }

    fn corollary1_coefficient(&self) -> f64 {
        let n = self.n as f64;
        n / (2.0 * self.a)
            + 3.0 * self.a * self.l2 * self.l2 / 2.0
            + self.a * self.l1 * self.l2 * self.sqrt_n() / 2.0
    }

    fn variation_coefficient(&self) -> f64 {
        2.0 * self.n as f64 * self.l1
    }
}

/// Bound for a single run with `eta = a / sqrt(tau)`:
/// `(n/(2a) + a L2^2/2) sqrt(tau) + 2 n sqrt(tau) V + L2 sqrt(n) tau / 2`.
pub fn theorem1_bound(input: &BoundInputs) -> Result<f64, RegretError> {
    input.validate()?;
    let n = input.n as f64;
    let tau = input.tau as f64;
    let st = tau.sqrt();
    Ok((n / (2.0 * input.a) + input.a * input.l2 * input.l2 / 2.0) * st
        + 2.0 * n * st * input.variation
        + input.l2 * input.sqrt_n() * tau / 2.0)
}

/// Bound over the constrained horizon `T <= (a L1)^2` with `eta = a / sqrt(T)`.
pub fn lemma3_bound(input: &BoundInputs) -> Result<f64, RegretError> {
    input.validate()?;
    input.check_constrained_horizon()?;
    Ok(input.lemma3_coefficient() * (input.block as f64).sqrt()
        + input.variation_coefficient() * input.variation)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryBound {
    pub bound: f64,
    pub epsilon: f64,
}

/// Finite-horizon bound of the restarted algorithm: `c1 tau^eps + c2 V` with
/// `tau^eps = ceil(tau/T) sqrt(T)`.
pub fn corollary1_bound(input: &BoundInputs) -> Result<CorollaryBound, RegretError> {
    input.validate()?;
    input.check_constrained_horizon()?;
    if input.tau < 2 {
        return Err(RegretError::InvalidInput(
            "tau must exceed 1 for the finite-horizon bound".into(),
        ));
    }
    if input.tau < input.block {
        return Err(RegretError::InvalidInput(format!(
            "tau = {} is shorter than T = {}",
            input.tau, input.block
        )));
    }
    let blocks = input.tau.div_ceil(input.block);
    Ok(CorollaryBound {
        bound: restarted_bound_value(input, blocks),
        epsilon: restart_epsilon(blocks, input.block, input.tau),
    })
}

/// The restarted bound evaluated at any round count `tau >= 1`.
///
/// Agrees with [`corollary1_bound`] whenever `tau >= T`. Inside the first block
/// it charges one full block, `c1 sqrt(T) + c2 V`, which dominates the
/// prefix of a single constrained-horizon run.
pub fn restarted_bound(input: &BoundInputs) -> Result<f64, RegretError> {
    input.validate()?;
    input.check_constrained_horizon()?;
    Ok(restarted_bound_value(input, input.tau.div_ceil(input.block)))
}

fn restarted_bound_value(input: &BoundInputs, blocks: u64) -> f64 {
    input.corollary1_coefficient() * blocks as f64 * (input.block as f64).sqrt()
        + input.variation_coefficient() * input.variation
}

/// Expected rounding error bound `L2 sqrt(n) / 2`.
pub fn lemma2_rounding_bound(n: usize, l2: f64) -> f64 {
    l2 * (n as f64).sqrt() / 2.0
}

/// Largest gradient norms seen on `samples` uniform points and on the
/// `2^min(n,10)` corners obtained by toggling the first `min(n,10)`
/// coordinates (the rest held at 0).
///
/// This is a lower estimate of the true Lipschitz moduli.
pub fn lipschitz_estimate<L, R>(oracle: &L, samples: usize, rng: &mut R) -> (f64, f64)
where
    L: LossOracle + ?Sized,
    R: Rng + ?Sized,
{
    let n = oracle.dim();
    let mut l1 = 0.0f64;
    let mut l2 = 0.0f64;
    let mut visit = |x: &[f64]| {
        let g = full_gradient(oracle, x);
        l1 = l1.max(norm1(&g));
        l2 = l2.max(norm2(&g));
    };
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        for xi in x.iter_mut() {
            *xi = rng.random::<f64>();
        }
        visit(&x);
    }
    let m = n.min(10);
    for code in 0u64..(1u64 << m) {
        x.iter_mut().for_each(|v| *v = 0.0);
        for (i, xi) in x.iter_mut().take(m).enumerate() {
            *xi = ((code >> i) & 1) as f64;
        }
        visit(&x);
    }
    (l1, l2)
}
