//! The bOGD update: proximal step on the relaxed box, Bernoulli rounding and
//! the block-restart schedule.

use rand::Rng;

use crate::error::OcoError;
use crate::loss::LossOracle;

/// Auxiliary continuous iterate in `[0,1]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedDecision(Vec<f64>);

impl RelaxedDecision {
    pub fn new(values: Vec<f64>) -> Result<Self, OcoError> {
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(OcoError::OutOfBox { index, value });
        }
        Ok(Self(values))
    }

    /// Every entry set to `value`.
    pub fn constant(n: usize, value: f64) -> Result<Self, OcoError> {
        Self::new(vec![value; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<&BinaryDecision> for RelaxedDecision {
    fn from(b: &BinaryDecision) -> Self {
        Self(b.to_f64())
    }
}

/// Implemented on/off controls.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryDecision(Vec<bool>);

impl BinaryDecision {
    pub fn new(values: Vec<bool>) -> Self {
        Self(values)
    }

    /// Decodes `code` as a little-endian bit vector: entry `i` is bit `i`.
    pub fn from_code(code: u64, n: usize) -> Self {
        Self((0..n).map(|i| (code >> i) & 1 == 1).collect())
    }

    /// Little-endian integer encoding, only meaningful for `n <= 64`.
    pub fn code(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

/// Step-size scale `a`, `l1` weight `lambda` and the horizon used to set
/// `eta = a / sqrt(horizon)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    a: f64,
    lambda: f64,
    horizon: u64,
}

impl StepConfig {
    pub fn new(a: f64, lambda: f64, horizon: u64) -> Result<Self, OcoError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(OcoError::InvalidStep(format!("a must be positive, got {a}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(OcoError::InvalidStep(format!(
                "lambda must be nonnegative, got {lambda}"
            )));
        }
        if horizon == 0 {
            return Err(OcoError::InvalidStep("horizon must be at least 1".into()));
        }
        Ok(Self { a, lambda, horizon })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn eta(&self) -> f64 {
        self.a / (self.horizon as f64).sqrt()
    }
}

/// Minimizer over `[0,1]^n` of `eta g^T x + 1/2 ||x - x_t||^2 + eta lambda ||x||_1`.
///
/// On the box `||x||_1 = 1^T x`, so the objective separates per coordinate and
/// the minimizer is `clip(x_t(i) - eta (g(i) + lambda), 0, 1)`.
pub fn prox_update(
    x: &RelaxedDecision,
    grad: &[f64],
    cfg: &StepConfig,
) -> Result<RelaxedDecision, OcoError> {
    if grad.len() != x.len() {
        return Err(OcoError::DimensionMismatch {
            expected: x.len(),
            actual: grad.len(),
        });
    }
    if let Some((index, &value)) = grad.iter().enumerate().find(|(_, g)| !g.is_finite()) {
        return Err(OcoError::NonFiniteGradient { index, value });
    }
    let eta = cfg.eta();
    let lambda = cfg.lambda();
    let next = x
        .as_slice()
        .iter()
        .zip(grad)
        .map(|(xi, gi)| (xi - eta * (gi + lambda)).clamp(0.0, 1.0))
        .collect();
    Ok(RelaxedDecision(next))
}

/// Independent Bernoulli draw per coordinate with success probability `x(i)`.
pub fn randomize<R: Rng + ?Sized>(x: &RelaxedDecision, rng: &mut R) -> BinaryDecision {
    // random::<f64>() is in [0, 1): p = 0 never fires and p = 1 always does.
    BinaryDecision(
        x.as_slice()
            .iter()
            .map(|&p| rng.random::<f64>() < p)
            .collect(),
    )
}

/// One bOGD round: gradient at the relaxed iterate, proximal step, rounding.
pub fn bogd_step<L, R>(
    x: &RelaxedDecision,
    oracle: &L,
    cfg: &StepConfig,
    rng: &mut R,
) -> Result<(RelaxedDecision, BinaryDecision), OcoError>
where
    L: LossOracle + ?Sized,
    R: Rng + ?Sized,
{
    if oracle.dim() != x.len() {
        return Err(OcoError::DimensionMismatch {
            expected: x.len(),
            actual: oracle.dim(),
        });
    }
    let grad = oracle.gradient(x.as_slice());
    let next = prox_update(x, &grad, cfg)?;
    let binary = randomize(&next, rng);
    Ok((next, binary))
}

/// Partition of `total_horizon` rounds into blocks of `block_length`; the last
/// block is truncated when the length does not divide the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestartSchedule {
    block_length: u64,
    total_horizon: u64,
}

impl RestartSchedule {
    pub fn new(block_length: u64, total_horizon: u64) -> Result<Self, OcoError> {
        if block_length == 0 || total_horizon == 0 {
            return Err(OcoError::InvalidSchedule(format!(
                "block length ({block_length}) and horizon ({total_horizon}) must be positive"
            )));
        }
        Ok(Self {
            block_length,
            total_horizon,
        })
    }

    pub fn block_length(&self) -> u64 {
        self.block_length
    }

    pub fn total_horizon(&self) -> u64 {
        self.total_horizon
    }

    pub fn num_blocks(&self) -> u64 {
        self.total_horizon.div_ceil(self.block_length)
    }

    /// `ln(N sqrt(T)) / ln(tau)`, so that `tau^eps = N sqrt(T)`.
    pub fn epsilon(&self) -> Result<f64, OcoError> {
        if self.total_horizon < 2 {
            return Err(OcoError::InvalidSchedule(
                "epsilon needs a horizon of at least 2 rounds".into(),
            ));
        }
        Ok(restart_epsilon(
            self.num_blocks(),
            self.block_length,
            self.total_horizon,
        ))
    }

    /// Whether 1-based `round` opens a block.
    pub fn is_block_start(&self, round: u64) -> bool {
        round >= 1 && (round - 1) % self.block_length == 0
    }

    /// 1-based round ranges of every block.
    pub fn blocks(&self) -> impl Iterator<Item = std::ops::RangeInclusive<u64>> + '_ {
        (0..self.num_blocks()).map(move |m| {
            let start = m * self.block_length + 1;
            let end = ((m + 1) * self.block_length).min(self.total_horizon);
            start..=end
        })
    }
}

// Split logarithm: ln(1000)/ln(10^4) evaluates to exactly 0.75 this way.
pub(crate) fn restart_epsilon(blocks: u64, block_length: u64, horizon: u64) -> f64 {
    ((blocks as f64).ln() + 0.5 * (block_length as f64).ln()) / (horizon as f64).ln()
}

/// Stateful bOGD learner: holds `x_t`, applies the proximal update and resets
/// to the initial iterate at block boundaries when a schedule is attached.
#[derive(Debug, Clone)]
pub struct Bogd {
    cfg: StepConfig,
    initial: RelaxedDecision,
    current: RelaxedDecision,
    schedule: Option<RestartSchedule>,
    round: u64,
}

impl Bogd {
    pub fn new(cfg: StepConfig, initial: RelaxedDecision) -> Self {
        Self {
            cfg,
            current: initial.clone(),
            initial,
            schedule: None,
            round: 1,
        }
    }

    pub fn with_restarts(mut self, schedule: RestartSchedule) -> Result<Self, OcoError> {
        if schedule.block_length() != self.cfg.horizon() {
            return Err(OcoError::InvalidSchedule(format!(
                "step horizon {} differs from block length {}",
                self.cfg.horizon(),
                schedule.block_length()
            )));
        }
        self.schedule = Some(schedule);
        Ok(self)
    }

    pub fn config(&self) -> &StepConfig {
        &self.cfg
    }

    /// Current 1-based round.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// `x_t` for the current round.
    pub fn relaxed(&self) -> &RelaxedDecision {
        &self.current
    }

    /// `R(x_t)`.
    pub fn implement<R: Rng + ?Sized>(&self, rng: &mut R) -> BinaryDecision {
        randomize(&self.current, rng)
    }

    /// Feeds the round-`t` gradient (taken at `x_t`) and advances to `t + 1`.
    pub fn observe(&mut self, grad: &[f64]) -> Result<(), OcoError> {
        let next = prox_update(&self.current, grad, &self.cfg)?;
        self.round += 1;
        self.current = match self.schedule {
            Some(s) if s.is_block_start(self.round) => self.initial.clone(),
            _ => next,
        };
        Ok(())
    }
}

/// One recorded round: `(t, x_t, x_hat_t, f_t(x_hat_t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub round: u64,
    pub relaxed: RelaxedDecision,
    pub binary: BinaryDecision,
    pub loss: f64,
}

/// Runs bOGD over `schedule.total_horizon()` rounds, restarting from `initial`
/// at each block boundary.
pub fn run_with_restarts<I, L, R>(
    schedule: &RestartSchedule,
    cfg: &StepConfig,
    initial: &RelaxedDecision,
    oracles: I,
    rng: &mut R,
) -> Result<Vec<TrajectoryPoint>, OcoError>
where
    I: IntoIterator<Item = L>,
    L: LossOracle,
    R: Rng + ?Sized,
{
    let mut learner = Bogd::new(*cfg, initial.clone()).with_restarts(*schedule)?;
    let mut oracles = oracles.into_iter().peekable();
    if oracles.peek().is_none() {
        return Err(OcoError::EmptyStream);
    }
    let horizon = schedule.total_horizon();
    let mut out = Vec::with_capacity(horizon as usize);
    for round in 1..=horizon {
        let oracle = oracles
            .next()
            .ok_or(OcoError::StreamExhausted { round, horizon })?;
        if oracle.dim() != initial.len() {
            return Err(OcoError::DimensionMismatch {
                expected: initial.len(),
                actual: oracle.dim(),
            });
        }
        let binary = learner.implement(rng);
        let loss = oracle.evaluate(&binary.to_f64());
        let grad = oracle.gradient(learner.relaxed().as_slice());
        out.push(TrajectoryPoint {
            round,
            relaxed: learner.relaxed().clone(),
            binary,
            loss,
        });
        learner.observe(&grad)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::{LinearLoss, QuadraticLoss};
    use crate::rng_from_seed;
    use proptest::prelude::*;

    /// Eq.-2 objective restricted to one coordinate.
    fn coord_objective(x: f64, xt: f64, g: f64, eta: f64, lambda: f64) -> f64 {
        eta * g * x + 0.5 * (x - xt).powi(2) + eta * lambda * x.abs()
    }

    /// Dense grid followed by golden-section refinement on [0, 1].
    fn numeric_argmin(f: impl Fn(f64) -> f64) -> f64 {
        let steps = 10_000;
        let mut best = 0.0;
        let mut best_val = f64::INFINITY;
        for k in 0..=steps {
            let x = k as f64 / steps as f64;
            let v = f(x);
            if v < best_val {
                best_val = v;
                best = x;
            }
        }
        let (mut lo, mut hi) = ((best - 1e-4f64).max(0.0), (best + 1e-4f64).min(1.0));
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if f(m1) <= f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    }

    fn cfg_with_eta(eta: f64, lambda: f64) -> StepConfig {
        StepConfig::new(eta, lambda, 1).unwrap()
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let x = RelaxedDecision::new(vec![0.5]).unwrap();
        for eta in [0.01, 1.0, 10.0] {
            let next = prox_update(&x, &[0.0], &cfg_with_eta(eta, 0.0)).unwrap();
            assert_eq!(next.as_slice(), &[0.5]);
        }
    }

    #[test]
    fn interior_step_matches_numeric_minimizer() {
        let x = RelaxedDecision::new(vec![0.5]).unwrap();
        let next = prox_update(&x, &[1.0], &cfg_with_eta(0.1, 0.0)).unwrap();
        let oracle = numeric_argmin(|z| coord_objective(z, 0.5, 1.0, 0.1, 0.0));
        assert!((oracle - 0.4).abs() < 1e-8);
        assert!((next.as_slice()[0] - oracle).abs() < 1e-8);
    }

    #[test]
    fn l1_shift_clips_at_zero() {
        let x = RelaxedDecision::new(vec![0.05]).unwrap();
        let next = prox_update(&x, &[1.0], &cfg_with_eta(0.1, 0.5)).unwrap();
        let oracle = numeric_argmin(|z| coord_objective(z, 0.05, 1.0, 0.1, 0.5));
        assert!(oracle.abs() < 1e-8);
        assert_eq!(next.as_slice(), &[0.0]);
    }

    #[test]
    fn negative_gradient_clips_at_one() {
        let x = RelaxedDecision::new(vec![0.9]).unwrap();
        let next = prox_update(&x, &[-2.0], &cfg_with_eta(1.0, 0.0)).unwrap();
        assert_eq!(next.as_slice(), &[1.0]);
    }

    #[test]
    fn prox_rejects_bad_gradients() {
        let x = RelaxedDecision::new(vec![0.5, 0.5]).unwrap();
        let cfg = cfg_with_eta(0.1, 0.0);
        assert!(matches!(
            prox_update(&x, &[1.0], &cfg),
            Err(OcoError::DimensionMismatch { expected: 2, actual: 1 })
        ));
        assert!(matches!(
            prox_update(&x, &[1.0, f64::NAN], &cfg),
            Err(OcoError::NonFiniteGradient { index: 1, .. })
        ));
    }

    #[test]
    fn relaxed_decision_rejects_out_of_box_entries() {
        assert!(RelaxedDecision::new(vec![0.0, 1.0]).is_ok());
        assert!(matches!(
            RelaxedDecision::new(vec![0.2, 1.5]),
            Err(OcoError::OutOfBox { index: 1, .. })
        ));
        assert!(RelaxedDecision::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn step_config_validates_and_derives_eta() {
        let cfg = StepConfig::new(2.0, 0.0, 16).unwrap();
        assert_eq!(cfg.eta(), 0.5);
        assert!(StepConfig::new(0.0, 0.0, 1).is_err());
        assert!(StepConfig::new(1.0, -1.0, 1).is_err());
        assert!(StepConfig::new(1.0, 0.0, 0).is_err());
    }

    #[test]
    fn degenerate_probabilities_round_deterministically() {
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let zeros = RelaxedDecision::new(vec![0.0; 3]).unwrap();
            let ones = RelaxedDecision::new(vec![1.0; 2]).unwrap();
            assert_eq!(randomize(&zeros, &mut rng).as_slice(), &[false; 3]);
            assert_eq!(randomize(&ones, &mut rng).as_slice(), &[true; 2]);
        }
    }

    #[test]
    fn randomizer_is_unbiased_within_four_sigma() {
        let draws = 100_000;
        let x = RelaxedDecision::new(vec![0.5]).unwrap();
        let mut rng = rng_from_seed(11);
        let hits = (0..draws)
            .filter(|_| randomize(&x, &mut rng).as_slice()[0])
            .count();
        let mean = hits as f64 / draws as f64;
        let slack = 4.0 * (0.25f64 / draws as f64).sqrt();
        assert!((mean - 0.5).abs() <= slack, "mean {mean}");
    }

    #[test]
    fn binary_code_is_little_endian() {
        let b = BinaryDecision::from_code(0b110, 3);
        assert_eq!(b.as_slice(), &[false, true, true]);
        assert_eq!(b.code(), 6);
        assert_eq!(BinaryDecision::new(vec![true, false]).code(), 1);
    }

    #[test]
    fn bogd_step_with_zero_gradient_keeps_binary_iterate() {
        let f = LinearLoss::new(vec![0.0, 0.0]);
        let x = RelaxedDecision::new(vec![0.0, 1.0]).unwrap();
        let cfg = StepConfig::new(0.5, 0.0, 4).unwrap();
        let (next, b) = bogd_step(&x, &f, &cfg, &mut rng_from_seed(1)).unwrap();
        assert_eq!(next.as_slice(), &[0.0, 1.0]);
        assert_eq!(b.as_slice(), &[false, true]);
    }

    #[test]
    fn bogd_step_at_stationary_point_stays() {
        let f = QuadraticLoss::centered(vec![2.0], &[0.3]);
        let x = RelaxedDecision::new(vec![0.3]).unwrap();
        let cfg = StepConfig::new(1.0, 0.0, 1).unwrap();
        let (next, _) = bogd_step(&x, &f, &cfg, &mut rng_from_seed(2)).unwrap();
        assert!((next.as_slice()[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn bogd_step_linear_loss_closed_form_and_frequency() {
        let f = LinearLoss::new(vec![1.0]);
        let x = RelaxedDecision::new(vec![0.5]).unwrap();
        let cfg = cfg_with_eta(0.2, 0.0);
        let trials = 100_000u64;
        let mut ones = 0u64;
        for seed in 0..trials {
            let (next, b) = bogd_step(&x, &f, &cfg, &mut rng_from_seed(seed)).unwrap();
            assert!((next.as_slice()[0] - 0.3).abs() < 1e-15);
            ones += u64::from(b.as_slice()[0]);
        }
        let freq = ones as f64 / trials as f64;
        let slack = 4.0 * (0.3 * 0.7 / trials as f64).sqrt();
        assert!((freq - 0.3).abs() <= slack, "freq {freq}");
    }

    #[test]
    fn gradient_is_taken_at_the_relaxed_iterate() {
        // f(x) = (x - 0.5)^2 has zero gradient at the relaxed iterate but not
        // at either binary point.
        let f = QuadraticLoss::centered(vec![2.0], &[0.5]);
        let x = RelaxedDecision::new(vec![0.5]).unwrap();
        let cfg = cfg_with_eta(0.3, 0.0);
        for seed in 0..10 {
            let (next, _) = bogd_step(&x, &f, &cfg, &mut rng_from_seed(seed)).unwrap();
            assert_eq!(next.as_slice(), &[0.5]);
        }
    }

    #[test]
    fn schedule_block_counts() {
        let s = RestartSchedule::new(5, 10).unwrap();
        assert_eq!(s.num_blocks(), 2);
        assert_eq!(s.blocks().collect::<Vec<_>>(), vec![1..=5, 6..=10]);
        let s = RestartSchedule::new(5, 7).unwrap();
        assert_eq!(s.num_blocks(), 2);
        assert_eq!(s.blocks().last().unwrap(), 6..=7);
        assert!(RestartSchedule::new(0, 7).is_err());
    }

    #[test]
    fn schedule_epsilon() {
        let s = RestartSchedule::new(100, 10_000).unwrap();
        assert_eq!(s.epsilon().unwrap(), 0.75);
        let s = RestartSchedule::new(64, 64).unwrap();
        assert!((s.epsilon().unwrap() - 0.5).abs() < 1e-15);
        assert!(RestartSchedule::new(1, 1).unwrap().epsilon().is_err());
    }

    fn drifting_linear_stream(n: usize, rounds: usize) -> Vec<LinearLoss> {
        (0..rounds)
            .map(|t| {
                LinearLoss::new(
                    (0..n)
                        .map(|i| ((t * 7 + i * 3) % 11) as f64 / 5.5 - 1.0)
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn restart_resets_to_initial_iterate() {
        let schedule = RestartSchedule::new(5, 10).unwrap();
        let cfg = StepConfig::new(0.5, 0.0, 5).unwrap();
        let init = RelaxedDecision::constant(2, 0.5).unwrap();
        let traj = run_with_restarts(
            &schedule,
            &cfg,
            &init,
            drifting_linear_stream(2, 10),
            &mut rng_from_seed(3),
        )
        .unwrap();
        assert_eq!(traj.len(), 10);
        assert_eq!(traj[0].relaxed, init);
        assert_eq!(traj[5].relaxed, init);
        assert_ne!(traj[4].relaxed, init);
        assert_eq!(traj[9].round, 10);
    }

    #[test]
    fn truncated_last_block() {
        let schedule = RestartSchedule::new(5, 7).unwrap();
        let cfg = StepConfig::new(0.5, 0.0, 5).unwrap();
        let init = RelaxedDecision::constant(1, 0.5).unwrap();
        let traj = run_with_restarts(
            &schedule,
            &cfg,
            &init,
            drifting_linear_stream(1, 20),
            &mut rng_from_seed(3),
        )
        .unwrap();
        assert_eq!(traj.len(), 7);
        assert_eq!(traj[5].relaxed, init);
    }

    #[test]
    fn single_block_equals_plain_algorithm() {
        let n = 3;
        let rounds = 100;
        let schedule = RestartSchedule::new(100, 100).unwrap();
        let cfg = StepConfig::new(0.8, 0.1, 100).unwrap();
        let init = RelaxedDecision::constant(n, 0.5).unwrap();
        let stream = drifting_linear_stream(n, rounds);
        let traj =
            run_with_restarts(&schedule, &cfg, &init, stream.clone(), &mut rng_from_seed(9))
                .unwrap();

        let mut rng = rng_from_seed(9);
        let mut x = init.clone();
        let mut xhat = randomize(&x, &mut rng);
        for (t, f) in stream.iter().enumerate() {
            assert_eq!(traj[t].relaxed, x);
            assert_eq!(traj[t].binary, xhat);
            assert_eq!(traj[t].loss, f.evaluate(&xhat.to_f64()));
            let (nx, nb) = bogd_step(&x, f, &cfg, &mut rng).unwrap();
            x = nx;
            xhat = nb;
        }
    }

    #[test]
    fn empty_or_short_streams_are_rejected() {
        let schedule = RestartSchedule::new(2, 4).unwrap();
        let cfg = StepConfig::new(1.0, 0.0, 2).unwrap();
        let init = RelaxedDecision::constant(1, 0.5).unwrap();
        let mut rng = rng_from_seed(0);
        assert_eq!(
            run_with_restarts(&schedule, &cfg, &init, Vec::<LinearLoss>::new(), &mut rng),
            Err(OcoError::EmptyStream)
        );
        assert!(matches!(
            run_with_restarts(&schedule, &cfg, &init, drifting_linear_stream(1, 3), &mut rng),
            Err(OcoError::StreamExhausted { round: 4, .. })
        ));
        let mismatched = StepConfig::new(1.0, 0.0, 3).unwrap();
        assert!(run_with_restarts(
            &schedule,
            &mismatched,
            &init,
            drifting_linear_stream(1, 4),
            &mut rng
        )
        .is_err());
    }

    fn grid_min_objective(xt: &[f64], g: &[f64], eta: f64, lambda: f64) -> f64 {
        // The objective is a sum of per-coordinate terms, so a coordinate-wise
        // grid search finds the grid minimum of the full objective.
        xt.iter()
            .zip(g)
            .map(|(&xi, &gi)| {
                (0..=10_000)
                    .map(|k| coord_objective(k as f64 * 1e-4, xi, gi, eta, lambda))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn prox_attains_grid_minimum(
            xt in prop::collection::vec(0.0f64..=1.0, 1..=8),
            g_seed in prop::collection::vec(-5.0f64..5.0, 8),
            eta in 1e-3f64..2.0,
            lambda in 0.0f64..2.0,
        ) {
            let n = xt.len();
            let g = &g_seed[..n];
            let x = RelaxedDecision::new(xt.clone()).unwrap();
            let next = prox_update(&x, g, &cfg_with_eta(eta, lambda)).unwrap();
            let closed: f64 = next.as_slice().iter().zip(&xt).zip(g)
                .map(|((&z, &xi), &gi)| coord_objective(z, xi, gi, eta, lambda))
                .sum();
            prop_assert!(closed <= grid_min_objective(&xt, g, eta, lambda) + 1e-6);
        }

        #[test]
        fn prox_is_coordinate_separable(
            a in prop::collection::vec(0.0f64..=1.0, 1..=5),
            b in prop::collection::vec(0.0f64..=1.0, 1..=5),
            ga in prop::collection::vec(-3.0f64..3.0, 5),
            gb in prop::collection::vec(-3.0f64..3.0, 5),
            eta in 1e-3f64..2.0,
            lambda in 0.0f64..2.0,
        ) {
            let cfg = cfg_with_eta(eta, lambda);
            let ga = &ga[..a.len()];
            let gb = &gb[..b.len()];
            let joint_x = RelaxedDecision::new([a.clone(), b.clone()].concat()).unwrap();
            let joint = prox_update(&joint_x, &[ga, gb].concat(), &cfg).unwrap();
            let pa = prox_update(&RelaxedDecision::new(a).unwrap(), ga, &cfg).unwrap();
            let pb = prox_update(&RelaxedDecision::new(b).unwrap(), gb, &cfg).unwrap();
            prop_assert_eq!(joint.into_inner(), [pa.into_inner(), pb.into_inner()].concat());
        }

        #[test]
        fn trajectories_are_feasible_and_deterministic(
            seed in any::<u64>(),
            n in 1usize..6,
            block in 1u64..8,
            horizon in 1u64..30,
        ) {
            let schedule = RestartSchedule::new(block, horizon).unwrap();
            let cfg = StepConfig::new(1.3, 0.05, block).unwrap();
            let init = RelaxedDecision::constant(n, 0.5).unwrap();
            let stream = drifting_linear_stream(n, horizon as usize);
            let t1 = run_with_restarts(&schedule, &cfg, &init, stream.clone(), &mut rng_from_seed(seed)).unwrap();
            let t2 = run_with_restarts(&schedule, &cfg, &init, stream, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(&t1, &t2);
            for p in &t1 {
                prop_assert!(p.relaxed.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
                prop_assert_eq!(p.binary.len(), n);
            }
        }
    }
}
