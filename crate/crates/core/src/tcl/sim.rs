use rand::Rng;

use super::config::{InitialDecision, ScenarioConfig};
use super::loss::{RoundInputs, TclLoss};
use super::params::{sample_fleet, LoadParams};
use super::signal::{generate_ambient, generate_setpoint};
use super::state::{Availability, AvailabilityRules, FleetState};
use super::thermal::ThermalModel;
use crate::error::TclError;
use crate::loss::LossOracle;
use crate::oco::{Bogd, RelaxedDecision, RestartSchedule, StepConfig};
use crate::regret::{
    binary_round_optimum, relaxed_round_optimum, RegretLedger, RegretRecord, VariationTracker,
    DEFAULT_RELAXED_TOL,
};
use crate::rng_from_seed;

/// Which decision the fleet actually receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dispatch {
    /// The randomized binary decision `x_hat_t`.
    Randomized,
    /// The relaxed iterate `x_t`, used as a fractional duty cycle.
    Relaxed,
}

/// Everything fixed before the first round: fleet, signals and the starting
/// iterate.
#[derive(Debug, Clone)]
pub struct Scenario {
    cfg: ScenarioConfig,
    loads: Vec<LoadParams>,
    model: ThermalModel,
    rules: AvailabilityRules,
    setpoint: Vec<f64>,
    ambient: Vec<f64>,
    initial: RelaxedDecision,
}

/// Per-round aggregates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub setpoint: f64,
    pub ambient: f64,
    /// Total effective draw of the dispatched decision.
    pub consumption: f64,
    /// `p^T x_hat + p_tilde^T u`.
    pub consumption_binary: f64,
    /// `p^T x + p_tilde^T u`.
    pub consumption_relaxed: f64,
    /// `p^T x* + p_tilde^T u` for the round's relaxed optimum.
    pub consumption_optimal: f64,
    /// `p_tilde^T u`.
    pub uncontrollable: f64,
    pub loss_binary: f64,
    pub loss_relaxed: f64,
    pub relaxed_optimum: f64,
    pub binary_optimum: Option<f64>,
    /// Cumulative variation of the relaxed optima up to this round.
    pub variation: f64,
    pub lipschitz_l1: f64,
    pub lipschitz_l2: f64,
    pub available: usize,
    pub overridden: usize,
    pub locked_out: usize,
}

/// Output of [`Scenario::simulate`].
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub dispatch: Dispatch,
    pub lockout_rounds: u32,
    pub rounds: Vec<RoundRecord>,
    /// `theta_t` per round, one entry per load.
    pub temperatures: Vec<Vec<f64>>,
    /// `<theta>_t` per round.
    pub mean_temperatures: Vec<Vec<f64>>,
    /// Effective draw per round and load.
    pub effective_power: Vec<Vec<f64>>,
    /// Override flags `u_t`.
    pub overrides: Vec<Vec<bool>>,
    pub status: Vec<Vec<Availability>>,
    /// Rounds in which a locked-out load drew power, counted online.
    pub lockout_violations: usize,
    pub ledger: RegretLedger,
}

impl RunRecord {
    pub fn max_lipschitz(&self) -> (f64, f64) {
        self.rounds.iter().fold((0.0f64, 0.0f64), |(a, b), r| {
            (a.max(r.lipschitz_l1), b.max(r.lipschitz_l2))
        })
    }

    pub fn variation(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.variation)
    }
}

impl Scenario {
    /// Validates `cfg`, samples the fleet and draws both signals. The starting
    /// iterate comes from the fleet stream right after the fleet itself, so
    /// both dispatch modes start from the same point.
    pub fn build(cfg: &ScenarioConfig) -> Result<Self, TclError> {
        cfg.validate()?;
        let n = cfg.run.n;
        let tau = cfg.run.tau;
        let mut fleet_rng = rng_from_seed(cfg.seeds.fleet);
        let loads = sample_fleet(n, &cfg.fleet, &mut fleet_rng)?;
        let initial = match cfg.algorithm.initial {
            InitialDecision::RandomBinary => (0..n)
                .map(|_| if fleet_rng.random::<f64>() < 0.5 { 1.0 } else { 0.0 })
                .collect(),
            InitialDecision::Half => vec![0.5; n],
        };
        let model = ThermalModel::new(&loads, cfg.run.h_hours, cfg.thermal.noise_variance)?;
        let setpoint = generate_setpoint(tau, &cfg.signal, &mut rng_from_seed(cfg.seeds.setpoint))?;
        let ambient = (1..=tau).map(|t| generate_ambient(t, tau, &cfg.ambient)).collect();
        Ok(Self {
            cfg: *cfg,
            loads,
            model,
            rules: cfg.availability_rules()?,
            setpoint,
            ambient,
            initial: RelaxedDecision::new(initial)?,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn loads(&self) -> &[LoadParams] {
        &self.loads
    }

    pub fn model(&self) -> &ThermalModel {
        &self.model
    }

    pub fn setpoint(&self) -> &[f64] {
        &self.setpoint
    }

    pub fn ambient(&self) -> &[f64] {
        &self.ambient
    }

    pub fn initial(&self) -> &RelaxedDecision {
        &self.initial
    }

    /// Runs the closed loop for `tau` rounds.
    ///
    /// Each round: availability update from `theta_{t-1}`, randomization of
    /// `x_t`, loss bookkeeping, thermal step under the dispatched decision,
    /// then the proximal update with the gradient taken at `x_t`. The
    /// randomized decision is drawn in both modes so that the random streams
    /// stay aligned.
    pub fn simulate(&self, dispatch: Dispatch) -> Result<RunRecord, TclError> {
        let cfg = &self.cfg;
        let n = cfg.run.n;
        let tau = cfg.run.tau;
        let block = cfg.run.restart_block;
        let k = self.rules.lockout_rounds;
        let mut rng_rand = rng_from_seed(cfg.seeds.randomization);
        let mut rng_noise = rng_from_seed(cfg.seeds.thermal_noise);
        let mut rng_override = rng_from_seed(cfg.seeds.manual_override);

        let step = StepConfig::new(cfg.algorithm.a, cfg.algorithm.lambda, block)?;
        let mut bogd = Bogd::new(step, self.initial.clone())
            .with_restarts(RestartSchedule::new(block, tau)?)?;
        let mut state = FleetState::new(&self.loads);
        let mut ledger = RegretLedger::new();
        let mut variation = VariationTracker::new();
        let enumerate = n <= cfg.analysis.binary_optimum_cap;

        let cap = tau as usize;
        let mut rec = RunRecord {
            dispatch,
            lockout_rounds: k,
            rounds: Vec::with_capacity(cap),
            temperatures: Vec::with_capacity(cap),
            mean_temperatures: Vec::with_capacity(cap),
            effective_power: Vec::with_capacity(cap),
            overrides: Vec::with_capacity(cap),
            status: Vec::with_capacity(cap),
            lockout_violations: 0,
            ledger: RegretLedger::new(),
        };

        for t in 1..=tau {
            let idx = (t - 1) as usize;
            state.availability_update(&self.loads, &self.rules, &mut rng_override);
            let x = bogd.relaxed().clone();
            let x_hat = bogd.implement(&mut rng_rand).to_f64();

            let loss = TclLoss::new(&RoundInputs {
                round: t,
                setpoint: self.setpoint[idx],
                ambient: self.ambient[idx],
                state: &state,
                model: &self.model,
                loads: &self.loads,
                rho: cfg.algorithm.rho,
                lambda: cfg.algorithm.lambda,
            })?;
            let loss_binary = loss.evaluate(&x_hat);
            let loss_relaxed = loss.evaluate(x.as_slice());
            let (x_star, f_star) = match loss.relaxed_optimum() {
                Some(opt) => opt,
                None => relaxed_round_optimum(&loss, DEFAULT_RELAXED_TOL)?,
            };
            let binary_optimum = if enumerate {
                Some(binary_round_optimum(&loss, cfg.analysis.binary_optimum_cap)?.1)
            } else {
                None
            };
            let consumption_optimal = state.p.iter().zip(x_star.as_slice()).map(|(p, x)| p * x).sum::<f64>()
                + loss.uncontrollable();
            variation.update(x_star)?;
            ledger.push(RegretRecord {
                loss_binary,
                loss_relaxed,
                binary_optimum,
                relaxed_optimum: Some(f_star),
            })?;

            let dispatched: &[f64] = match dispatch {
                Dispatch::Randomized => &x_hat,
                Dispatch::Relaxed => x.as_slice(),
            };
            let effective = state.effective_power(dispatched);
            let uncontrollable = loss.uncontrollable();
            let consumption: f64 = effective.iter().sum();
            let controllable = |d: &[f64]| -> f64 { state.p.iter().zip(d).map(|(p, x)| p * x).sum() };
            for (s, e) in state.status.iter().zip(&effective) {
                if *s == Availability::Lockout && *e != 0.0 {
                    rec.lockout_violations += 1;
                }
            }
            let count = |a: Availability| state.status.iter().filter(|&&s| s == a).count();
            let theta_next = self.model.step(&state, dispatched, self.ambient[idx], &mut rng_noise)?;
            let grad = loss.gradient(x.as_slice());

            rec.rounds.push(RoundRecord {
                round: t,
                setpoint: self.setpoint[idx],
                ambient: self.ambient[idx],
                consumption,
                consumption_binary: controllable(&x_hat) + uncontrollable,
                consumption_relaxed: controllable(x.as_slice()) + uncontrollable,
                consumption_optimal,
                uncontrollable,
                loss_binary,
                loss_relaxed,
                relaxed_optimum: f_star,
                binary_optimum,
                variation: variation.total(),
                lipschitz_l1: loss.lipschitz_l1(),
                lipschitz_l2: loss.lipschitz_l2(),
                available: count(Availability::Available),
                overridden: state.u.iter().filter(|&&u| u).count(),
                locked_out: count(Availability::Lockout),
            });
            rec.overrides.push(state.u.clone());
            rec.status.push(state.status.clone());
            state.advance(theta_next, &effective, k);
            rec.temperatures.push(state.theta.clone());
            rec.mean_temperatures.push(state.mean_theta.clone());
            rec.effective_power.push(effective);
            bogd.observe(&grad)?;
        }
        rec.ledger = ledger;
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tcl::metrics::lockout_violations;
    use crate::tcl::params::ParamRange;

    fn small(n: usize, tau: u64) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.run.n = n;
        cfg.run.tau = tau;
        cfg.run.restart_block = tau;
        cfg.signal.s0 = 2.4 * n as f64;
        cfg
    }

    #[test]
    fn lockout_is_exact_in_both_modes() {
        let cfg = small(40, 150);
        let sc = Scenario::build(&cfg).unwrap();
        for mode in [Dispatch::Randomized, Dispatch::Relaxed] {
            let rec = sc.simulate(mode).unwrap();
            assert_eq!(rec.lockout_violations, 0);
            assert_eq!(lockout_violations(&rec.effective_power, &rec.overrides, rec.lockout_rounds), 0);
        }
    }

    #[test]
    fn too_hot_loads_are_cooled_with_noise_off() {
        let mut cfg = small(60, 300);
        cfg.thermal.noise_variance = 0.0;
        cfg.signal.s0 = 0.0;
        cfg.signal.noise_scale = 0.0;
        let sc = Scenario::build(&cfg).unwrap();
        let rec = sc.simulate(Dispatch::Randomized).unwrap();
        let b = sc.model().decay();
        for t in 1..rec.temperatures.len() {
            for (i, load) in sc.loads().iter().enumerate() {
                let prev = rec.temperatures[t - 1][i];
                if prev > load.theta_max && rec.status[t][i] != Availability::Lockout {
                    assert!(rec.overrides[t][i]);
                    assert!(rec.temperatures[t][i] < prev);
                }
                // Excess above the band is at most K + 1 rounds of free drift.
                let drift = (1.0 - b[i]) * (34.25 - load.theta_max);
                assert!(rec.temperatures[t][i] - load.theta_max <= drift * (rec.lockout_rounds + 1) as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn mean_temperature_recursion_and_power_accounting() {
        let cfg = small(25, 60);
        let sc = Scenario::build(&cfg).unwrap();
        let rec = sc.simulate(Dispatch::Randomized).unwrap();
        let n = 25;
        for i in 0..n {
            let mut sum = 0.0;
            for t in 0..rec.temperatures.len() {
                sum += rec.temperatures[t][i];
                let mean = sum / (t + 1) as f64;
                assert!((rec.mean_temperatures[t][i] - mean).abs() < 1e-9);
            }
        }
        for (r, e) in rec.rounds.iter().zip(&rec.effective_power) {
            assert_eq!(r.consumption, e.iter().sum::<f64>());
            assert!((r.consumption - r.consumption_binary).abs() <= 1e-9 * r.consumption.max(1.0));
        }
    }

    #[test]
    fn all_overridden_fleet_ignores_dispatch() {
        let mut cfg = small(10, 20);
        cfg.manual_override.probability = 1.0;
        let sc = Scenario::build(&cfg).unwrap();
        let a = sc.simulate(Dispatch::Randomized).unwrap();
        let b = sc.simulate(Dispatch::Relaxed).unwrap();
        for (ra, rb) in a.rounds.iter().zip(&b.rounds) {
            assert_eq!(ra.consumption, rb.consumption);
            assert_eq!(ra.consumption_binary, ra.consumption_relaxed);
        }
        assert_eq!(a.temperatures, b.temperatures);
    }

    #[test]
    fn relaxed_iterate_approaches_tracking_solution() {
        // Constant setpoint, no regularizers, loads always available.
        let mut cfg = small(12, 400);
        cfg.signal.noise_scale = 0.0;
        cfg.signal.s0 = 30.0;
        cfg.algorithm.rho = 0.0;
        cfg.algorithm.lambda = 0.0;
        cfg.algorithm.a = 0.05;
        cfg.algorithm.initial = InitialDecision::Half;
        cfg.thermal.noise_variance = 0.0;
        cfg.fleet.half_width = ParamRange(50.0, 50.0);
        let sc = Scenario::build(&cfg).unwrap();
        let rec = sc.simulate(Dispatch::Relaxed).unwrap();
        let early: f64 = rec.rounds[..20].iter().map(|r| r.loss_relaxed).sum::<f64>() / 20.0;
        let late: f64 = rec.rounds[380..].iter().map(|r| r.loss_relaxed).sum::<f64>() / 20.0;
        assert!(late < 0.1 * early, "{early} -> {late}");
        assert!(late < 1e-3 * 30.0 * 30.0);
    }

    #[test]
    fn small_fleet_enumerates_binary_optima() {
        let cfg = small(6, 30);
        let sc = Scenario::build(&cfg).unwrap();
        let rec = sc.simulate(Dispatch::Randomized).unwrap();
        for r in &rec.rounds {
            let b = r.binary_optimum.unwrap();
            assert!(r.relaxed_optimum <= b + 1e-9 * b.abs().max(1.0));
            assert!(b <= r.loss_binary + 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = small(30, 40);
        let a = Scenario::build(&cfg).unwrap().simulate(Dispatch::Randomized).unwrap();
        let b = Scenario::build(&cfg).unwrap().simulate(Dispatch::Randomized).unwrap();
        assert_eq!(a.rounds, b.rounds);
        assert_eq!(a.temperatures, b.temperatures);
    }
}
