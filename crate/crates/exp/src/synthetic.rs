//! Small-n regret validation on quadratic losses with brute-force hindsight
//! optima.

use std::f64::consts::PI;
use std::path::Path;

use bogd::regret::{
    binary_round_optimum, lemma3_bound, relaxed_round_optimum, restarted_bound, theorem1_bound,
    BoundInputs, VariationTracker, DEFAULT_RELAXED_TOL,
};
use bogd::{rng_from_seed, run_with_restarts, LossOracle, QuadraticLoss, RelaxedDecision, RestartSchedule, StepConfig};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{canonical, SyntheticConfig, SyntheticKind};
use crate::error::{ExpError, Result};
use crate::manifest::{code_version, sha256_hex, RunManifest};
use crate::output::{create_dir, fmt_num, fmt_opt, write_text, Table};
use crate::stats::mean_stderr;

/// The loss sequence together with its hindsight quantities.
#[derive(Debug, Clone)]
pub struct SyntheticProblem {
    pub hessian: Vec<f64>,
    pub centers: Vec<Vec<f64>>,
    pub losses: Vec<QuadraticLoss>,
    pub binary_optima: Vec<f64>,
    pub relaxed_optima: Vec<RelaxedDecision>,
    pub relaxed_optimum_values: Vec<f64>,
    /// Cumulative variation after each round.
    pub variation: Vec<f64>,
    pub lipschitz_l1: f64,
    pub lipschitz_l2: f64,
}

/// Center of round `t`.
pub fn center(cfg: &SyntheticConfig, base: &[f64], phase: &[f64], t: u64) -> Vec<f64> {
    let p = &cfg.problem;
    let (amp, arg) = match p.kind {
        SyntheticKind::Static => (p.drift_amplitude, 0.0),
        SyntheticKind::Drifting => (
            p.drift_amplitude * (-(t as f64) / p.drift_settle).exp(),
            2.0 * PI * t as f64 / p.drift_period,
        ),
    };
    base.iter()
        .zip(phase)
        .map(|(b, ph)| b + amp * (arg + ph).sin())
        .collect()
}

/// Draws `Q = coupling A^T A / n + curvature I` with `A(i,j)` uniform on
/// `[-1, 1]`, a base center per coordinate at -1 or 2, and a phase per
/// coordinate; then solves every round in hindsight.
pub fn build_problem(cfg: &SyntheticConfig) -> Result<SyntheticProblem> {
    cfg.validate()?;
    let p = &cfg.problem;
    let n = p.n;
    let mut rng = rng_from_seed(cfg.seeds.problem);
    let a: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let g: f64 = (0..n).map(|k| a[k * n + i] * a[k * n + j]).sum();
            q[i * n + j] = p.coupling * g / n as f64 + if i == j { p.curvature } else { 0.0 };
        }
    }
    let base: Vec<f64> = (0..n).map(|_| if rng.random::<f64>() < 0.5 { -1.0 } else { 2.0 }).collect();
    let phase: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    let centers: Vec<Vec<f64>> = (1..=p.tau).map(|t| center(cfg, &base, &phase, t)).collect();
    let losses: Vec<QuadraticLoss> = centers
        .iter()
        .map(|c| QuadraticLoss::centered(q.clone(), c))
        .collect();
    let cap = cfg.analysis.binary_optimum_cap;
    let solved: Vec<(f64, RelaxedDecision, f64)> = losses
        .par_iter()
        .map(|l| -> Result<_> {
            let (_, fb) = binary_round_optimum(l, cap)?;
            let (x, fx) = relaxed_round_optimum(l, DEFAULT_RELAXED_TOL)?;
            Ok((fb, x, fx))
        })
        .collect::<Result<_>>()?;
    let mut tracker = VariationTracker::new();
    let mut variation = Vec::with_capacity(losses.len());
    let mut binary_optima = Vec::with_capacity(losses.len());
    let mut relaxed_optima = Vec::with_capacity(losses.len());
    let mut relaxed_optimum_values = Vec::with_capacity(losses.len());
    for (fb, x, fx) in solved {
        tracker.update(x.clone())?;
        variation.push(tracker.total());
        binary_optima.push(fb);
        relaxed_optima.push(x);
        relaxed_optimum_values.push(fx);
    }
    let lipschitz_l1 = losses.iter().map(|l| l.lipschitz_l1()).fold(0.0, f64::max);
    let lipschitz_l2 = losses.iter().map(|l| l.lipschitz_l2()).fold(0.0, f64::max);
    Ok(SyntheticProblem {
        hessian: q,
        centers,
        losses,
        binary_optima,
        relaxed_optima,
        relaxed_optimum_values,
        variation,
        lipschitz_l1,
        lipschitz_l2,
    })
}

/// One replication's per-round losses.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub loss_binary: Vec<f64>,
    pub loss_relaxed: Vec<f64>,
}

/// Runs bOGD from `x_1 = 0.5` with restarts, randomization seed `seed`.
pub fn replicate_once(cfg: &SyntheticConfig, problem: &SyntheticProblem, seed: u64) -> Result<Replication> {
    let p = &cfg.problem;
    let schedule = RestartSchedule::new(p.restart_block, p.tau)?;
    let step = StepConfig::new(p.a, 0.0, p.restart_block)?;
    let initial = RelaxedDecision::constant(p.n, 0.5)?;
    let traj = run_with_restarts(&schedule, &step, &initial, problem.losses.iter(), &mut rng_from_seed(seed))?;
    let loss_relaxed = traj
        .iter()
        .zip(&problem.losses)
        .map(|(pt, l)| l.evaluate(pt.relaxed.as_slice()))
        .collect();
    Ok(Replication {
        loss_binary: traj.iter().map(|pt| pt.loss).collect(),
        loss_relaxed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticRow {
    pub round: u64,
    /// Mean and standard error of the dynamic regret against `b*`.
    pub regret: (f64, f64),
    /// Mean and standard error of the cumulative rounding error.
    pub rounding: (f64, f64),
    /// Relaxed regret; identical across replications since `x_t` does not
    /// depend on the randomization.
    pub regret_relaxed: f64,
    pub binary_optimum: f64,
    pub relaxed_optimum: f64,
    pub variation: f64,
    pub theorem1: Option<f64>,
    pub lemma3: Option<f64>,
    pub corollary1: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SyntheticOutcome {
    pub problem: SyntheticProblem,
    pub rows: Vec<SyntheticRow>,
    /// Largest `R_t - R_t(relaxed) - sum |f(x_hat) - f(x)|` over every
    /// replication and round; never positive when the decomposition holds.
    pub lemma1_max_excess: f64,
    pub replications: usize,
}

impl SyntheticOutcome {
    pub fn mean_regret(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.regret.0).collect()
    }
}

pub fn evaluate(cfg: &SyntheticConfig, replications: usize) -> Result<SyntheticOutcome> {
    cfg.validate()?;
    if replications == 0 {
        return Err(ExpError::Config("replication count must be at least 1".into()));
    }
    let problem = build_problem(cfg)?;
    let reps: Vec<Replication> = (0..replications as u64)
        .into_par_iter()
        .map(|k| replicate_once(cfg, &problem, cfg.seeds.randomization.wrapping_add(k)))
        .collect::<Result<_>>()?;
    let tau = problem.losses.len();
    let mut regret = vec![0.0; replications];
    let mut rounding = vec![0.0; replications];
    let mut relaxed = 0.0;
    let mut excess = f64::NEG_INFINITY;
    let p = &cfg.problem;
    let mut rows = Vec::with_capacity(tau);
    for t in 0..tau {
        let fb = problem.binary_optima[t];
        let fx = problem.relaxed_optimum_values[t];
        relaxed += reps[0].loss_relaxed[t] - fx;
        for (k, r) in reps.iter().enumerate() {
            regret[k] += r.loss_binary[t] - fb;
            rounding[k] += (r.loss_binary[t] - r.loss_relaxed[t]).abs();
            excess = excess.max(regret[k] - relaxed - rounding[k]);
        }
        let inputs = BoundInputs {
            n: p.n,
            a: p.a,
            l1: problem.lipschitz_l1,
            l2: problem.lipschitz_l2,
            tau: t as u64 + 1,
            block: p.restart_block,
            variation: problem.variation[t],
        };
        rows.push(SyntheticRow {
            round: t as u64 + 1,
            regret: mean_stderr(&regret),
            rounding: mean_stderr(&rounding),
            regret_relaxed: relaxed,
            binary_optimum: fb,
            relaxed_optimum: fx,
            variation: problem.variation[t],
            theorem1: theorem1_bound(&inputs).ok(),
            lemma3: lemma3_bound(&inputs).ok(),
            corollary1: restarted_bound(&inputs).ok(),
        });
    }
    Ok(SyntheticOutcome {
        problem,
        rows,
        lemma1_max_excess: excess,
        replications,
    })
}

/// Writes `synthetic.csv` and `manifest.txt`.
pub fn run_synthetic(cfg: &SyntheticConfig, replications: usize, out: &Path) -> Result<SyntheticOutcome> {
    let outcome = evaluate(cfg, replications)?;
    create_dir(out)?;
    let mut t = Table::new([
        "round",
        "mean_regret",
        "stderr_regret",
        "regret_relaxed",
        "mean_rounding_error",
        "stderr_rounding_error",
        "binary_optimum",
        "relaxed_optimum",
        "variation",
        "theorem1_bound",
        "lemma3_bound",
        "corollary1_bound",
    ]);
    for r in &outcome.rows {
        t.push(vec![
            r.round.to_string(),
            fmt_num(r.regret.0),
            fmt_num(r.regret.1),
            fmt_num(r.regret_relaxed),
            fmt_num(r.rounding.0),
            fmt_num(r.rounding.1),
            fmt_num(r.binary_optimum),
            fmt_num(r.relaxed_optimum),
            fmt_num(r.variation),
            fmt_opt(r.theorem1),
            fmt_opt(r.lemma3),
            fmt_opt(r.corollary1),
        ]);
    }
    t.write(&out.join("synthetic.csv"))?;
    let m = RunManifest {
        command: "synthetic".into(),
        config_sha256: sha256_hex(&canonical(cfg)),
        version: code_version(),
        seeds: vec![
            ("problem".into(), cfg.seeds.problem),
            ("randomization".into(), cfg.seeds.randomization),
        ],
        start_round: 1,
        end_round: cfg.problem.tau,
        outputs: vec!["synthetic.csv".into()],
        extra: vec![
            ("replications".into(), replications.to_string()),
            ("lipschitz_l1".into(), fmt_num(outcome.problem.lipschitz_l1)),
            ("lipschitz_l2".into(), fmt_num(outcome.problem.lipschitz_l2)),
        ],
    };
    write_text(&out.join("manifest.txt"), &m.render())?;
    Ok(outcome)
}
