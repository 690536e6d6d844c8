//! TCL scenario runs and Monte-Carlo replications.

use std::path::Path;

use bogd::regret::{restarted_bound, theorem1_bound, BoundInputs, CumulativeRegret};
use bogd::tcl::metrics::{consumption_gap, lockout_violations, relative_rmse, rmse, tracking_metrics};
use bogd::tcl::{Dispatch, RunRecord, Scenario, ScenarioConfig, TrackingMetrics};
use rayon::prelude::*;

use crate::config::{canonical, ExperimentConfig, Vary};
use crate::error::Result;
use crate::manifest::{code_version, sha256_hex, RunManifest};
use crate::output::{create_dir, fmt_num, fmt_opt, write_text, Table};
use crate::stats::mean_stderr;

/// Regret and bounds after one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretRow {
    pub round: u64,
    pub cumulative: CumulativeRegret,
    pub variation: f64,
    pub corollary1: Option<f64>,
    pub theorem1: Option<f64>,
}

/// Headline numbers of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub rounds: u64,
    /// Decisions of the bOGD run: randomized (dispatched) and relaxed.
    pub bogd: TrackingMetrics,
    pub relaxed: TrackingMetrics,
    pub optimal_rmse: f64,
    pub optimal_relative_rmse: f64,
    /// Second closed loop that dispatches the relaxed iterate itself.
    pub closed_loop_relaxed: TrackingMetrics,
    /// Mean relative gap between the consumption of the two closed loops.
    pub closed_loop_gap: f64,
    pub lockout_violations: usize,
    pub totals: CumulativeRegret,
    pub variation: f64,
    pub lipschitz_l1: f64,
    pub lipschitz_l2: f64,
    pub corollary1: Option<f64>,
    pub theorem1: Option<f64>,
}

impl Summary {
    /// Relative RMSE difference between randomized and relaxed decisions, in
    /// percentage points.
    pub fn relative_rmse_gap_pp(&self) -> f64 {
        100.0 * (self.bogd.relative_rmse - self.relaxed.relative_rmse).abs()
    }
}

pub struct ScenarioOutcome {
    pub scenario: Scenario,
    pub bogd: RunRecord,
    pub closed_loop_relaxed: RunRecord,
    pub regret: Vec<RegretRow>,
    pub summary: Summary,
}

fn bound_inputs(cfg: &ScenarioConfig, l1: f64, l2: f64, tau: u64, variation: f64) -> BoundInputs {
    BoundInputs {
        n: cfg.run.n,
        a: cfg.algorithm.a,
        l1,
        l2,
        tau,
        block: cfg.run.restart_block,
        variation,
    }
}

/// Cumulative regrets with the restarted and single-run bounds per round.
/// The bounds use the largest Lipschitz constants of the whole run.
pub fn regret_curve(cfg: &ScenarioConfig, record: &RunRecord) -> Vec<RegretRow> {
    let (l1, l2) = record.max_lipschitz();
    record
        .ledger
        .cumulative()
        .into_iter()
        .zip(&record.rounds)
        .map(|(cumulative, r)| {
            let inputs = bound_inputs(cfg, l1, l2, r.round, r.variation);
            RegretRow {
                round: r.round,
                cumulative,
                variation: r.variation,
                corollary1: restarted_bound(&inputs).ok(),
                theorem1: theorem1_bound(&inputs).ok(),
            }
        })
        .collect()
}

/// Runs the bOGD closed loop and the relaxed closed loop of one scenario.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let sc_cfg = cfg.scenario();
    let scenario = Scenario::build(&sc_cfg)?;
    let (bogd, relaxed) = rayon::join(
        || scenario.simulate(Dispatch::Randomized),
        || scenario.simulate(Dispatch::Relaxed),
    );
    let (bogd, closed_loop_relaxed) = (bogd?, relaxed?);
    let regret = regret_curve(&sc_cfg, &bogd);

    let s: Vec<f64> = bogd.rounds.iter().map(|r| r.setpoint).collect();
    let series = |rec: &RunRecord, f: fn(&bogd::tcl::RoundRecord) -> f64| -> Vec<f64> {
        rec.rounds.iter().map(f).collect()
    };
    let binary = series(&bogd, |r| r.consumption_binary);
    let relaxed_c = series(&bogd, |r| r.consumption_relaxed);
    let optimal = series(&bogd, |r| r.consumption_optimal);
    let closed = series(&closed_loop_relaxed, |r| r.consumption);
    let relaxed_metrics = TrackingMetrics {
        rmse: rmse(&s, &relaxed_c),
        relative_rmse: relative_rmse(&s, &relaxed_c),
        mean_relative_tracking_error: bogd::tcl::metrics::mean_relative_tracking_error(&s, &relaxed_c),
        mean_randomization_gap: consumption_gap(&binary, &relaxed_c),
        mean_setpoint: bogd::tcl::metrics::mean(&s),
    };
    let k = bogd.lockout_rounds;
    let violations = bogd.lockout_violations
        + closed_loop_relaxed.lockout_violations
        + lockout_violations(&bogd.effective_power, &bogd.overrides, k)
        + lockout_violations(&closed_loop_relaxed.effective_power, &closed_loop_relaxed.overrides, k);
    let (l1, l2) = bogd.max_lipschitz();
    let last = regret.last().copied();
    let summary = Summary {
        rounds: sc_cfg.run.tau,
        bogd: tracking_metrics(&bogd),
        relaxed: relaxed_metrics,
        optimal_rmse: rmse(&s, &optimal),
        optimal_relative_rmse: relative_rmse(&s, &optimal),
        closed_loop_relaxed: tracking_metrics(&closed_loop_relaxed),
        closed_loop_gap: consumption_gap(&binary, &closed),
        lockout_violations: violations,
        totals: bogd.ledger.totals(),
        variation: bogd.variation(),
        lipschitz_l1: l1,
        lipschitz_l2: l2,
        corollary1: last.and_then(|r| r.corollary1),
        theorem1: last.and_then(|r| r.theorem1),
    };
    Ok(ScenarioOutcome {
        scenario,
        bogd,
        closed_loop_relaxed,
        regret,
        summary,
    })
}

fn timeseries_table(cfg: &ExperimentConfig, o: &ScenarioOutcome) -> Table {
    let mut header: Vec<String> = [
        "round",
        "setpoint",
        "ambient",
        "consumption_bogd",
        "consumption_relaxed",
        "consumption_optimal",
        "consumption_relaxed_closed_loop",
        "uncontrollable",
        "available",
        "overridden",
        "locked_out",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(cfg.output.tracked_loads.iter().map(|i| format!("theta_{i}")));
    let mut t = Table::new(header);
    for (idx, (r, c)) in o.bogd.rounds.iter().zip(&o.closed_loop_relaxed.rounds).enumerate() {
        let mut row = vec![
            r.round.to_string(),
            fmt_num(r.setpoint),
            fmt_num(r.ambient),
            fmt_num(r.consumption),
            fmt_num(r.consumption_relaxed),
            fmt_num(r.consumption_optimal),
            fmt_num(c.consumption),
            fmt_num(r.uncontrollable),
            r.available.to_string(),
            r.overridden.to_string(),
            r.locked_out.to_string(),
        ];
        row.extend(cfg.output.tracked_loads.iter().map(|&i| fmt_num(o.bogd.temperatures[idx][i])));
        t.push(row);
    }
    t
}

fn regret_table(rows: &[RegretRow]) -> Table {
    let mut t = Table::new([
        "round",
        "regret_empirical",
        "regret_relaxed_proxy",
        "corollary1_bound",
        "theorem1_bound",
        "regret_relaxed",
        "rounding_error",
        "variation",
    ]);
    for r in rows {
        t.push(vec![
            r.round.to_string(),
            fmt_opt(r.cumulative.dynamic),
            fmt_opt(r.cumulative.relaxed_proxy),
            fmt_opt(r.corollary1),
            fmt_opt(r.theorem1),
            fmt_opt(r.cumulative.relaxed),
            fmt_num(r.cumulative.rounding),
            fmt_num(r.variation),
        ]);
    }
    t
}

fn summary_table(cfg: &ExperimentConfig, s: &Summary) -> Table {
    let epsilon = bogd::RestartSchedule::new(cfg.run.restart_block, cfg.run.tau)
        .ok()
        .and_then(|r| r.epsilon().ok());
    let rows: Vec<(&str, String)> = vec![
        ("rounds", s.rounds.to_string()),
        ("n", cfg.run.n.to_string()),
        ("mean_setpoint_kw", fmt_num(s.bogd.mean_setpoint)),
        ("rmse_bogd_kw", fmt_num(s.bogd.rmse)),
        ("relative_rmse_bogd", fmt_num(s.bogd.relative_rmse)),
        ("rmse_relaxed_kw", fmt_num(s.relaxed.rmse)),
        ("relative_rmse_relaxed", fmt_num(s.relaxed.relative_rmse)),
        ("relative_rmse_difference_pp", fmt_num(s.relative_rmse_gap_pp())),
        ("mean_relative_tracking_error_bogd", fmt_num(s.bogd.mean_relative_tracking_error)),
        ("mean_relative_tracking_error_relaxed", fmt_num(s.relaxed.mean_relative_tracking_error)),
        ("mean_randomization_gap", fmt_num(s.bogd.mean_randomization_gap)),
        ("rmse_optimal_kw", fmt_num(s.optimal_rmse)),
        ("relative_rmse_optimal", fmt_num(s.optimal_relative_rmse)),
        ("closed_loop_rmse_relaxed_kw", fmt_num(s.closed_loop_relaxed.rmse)),
        ("closed_loop_relative_rmse_relaxed", fmt_num(s.closed_loop_relaxed.relative_rmse)),
        ("closed_loop_consumption_gap", fmt_num(s.closed_loop_gap)),
        ("lockout_violations", s.lockout_violations.to_string()),
        ("regret_empirical", fmt_opt(s.totals.dynamic)),
        ("regret_relaxed_proxy", fmt_opt(s.totals.relaxed_proxy)),
        ("regret_relaxed", fmt_opt(s.totals.relaxed)),
        ("rounding_error", fmt_num(s.totals.rounding)),
        ("variation", fmt_num(s.variation)),
        ("lipschitz_l1", fmt_num(s.lipschitz_l1)),
        ("lipschitz_l2", fmt_num(s.lipschitz_l2)),
        ("corollary1_bound", fmt_opt(s.corollary1)),
        ("theorem1_bound", fmt_opt(s.theorem1)),
        ("corollary1_epsilon", fmt_opt(epsilon)),
    ];
    let mut t = Table::new(["metric", "value"]);
    for (k, v) in rows {
        t.push(vec![k.to_string(), v]);
    }
    t
}

fn manifest(command: &str, cfg: &ExperimentConfig, outputs: &[&str], extra: Vec<(String, String)>) -> RunManifest {
    RunManifest {
        command: command.into(),
        config_sha256: sha256_hex(&canonical(cfg)),
        version: code_version(),
        seeds: cfg.seeds.iter().map(|(k, v)| (k.to_string(), v)).collect(),
        start_round: 1,
        end_round: cfg.run.tau,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        extra,
    }
}

/// Writes `timeseries.csv`, `regret.csv`, `summary.csv` and `manifest.txt`.
pub fn run_scenario(cfg: &ExperimentConfig, out: &Path) -> Result<Summary> {
    let outcome = evaluate(cfg)?;
    create_dir(out)?;
    let names = ["timeseries.csv", "regret.csv", "summary.csv"];
    timeseries_table(cfg, &outcome).write(&out.join(names[0]))?;
    regret_table(&outcome.regret).write(&out.join(names[1]))?;
    summary_table(cfg, &outcome.summary).write(&out.join(names[2]))?;
    let m = manifest("run", cfg, &names, vec![]);
    write_text(&out.join("manifest.txt"), &m.render())?;
    Ok(outcome.summary)
}

/// Per-round mean and standard error over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicatedCurve {
    pub round: u64,
    pub empirical: Option<(f64, f64)>,
    pub relaxed_proxy: (f64, f64),
    pub relaxed: (f64, f64),
    pub corollary1: Option<f64>,
}

/// Seeds of replication `k`.
pub fn replication_config(cfg: &ExperimentConfig, k: usize) -> ExperimentConfig {
    let mut c = cfg.clone();
    let k = k as u64;
    match cfg.replication.vary {
        Vary::Randomization => c.seeds.randomization = cfg.seeds.randomization.wrapping_add(k),
        Vary::All => {
            let s = &mut c.seeds;
            s.randomization = s.randomization.wrapping_add(k);
            s.thermal_noise = s.thermal_noise.wrapping_add(k);
            s.setpoint = s.setpoint.wrapping_add(k);
            s.fleet = s.fleet.wrapping_add(k);
            s.manual_override = s.manual_override.wrapping_add(k);
        }
    }
    c
}

/// Reruns the bOGD closed loop `count` times, replication `k` offsetting the
/// varied seeds by `k`, and averages the regret curves in replication order.
pub fn replicate(cfg: &ExperimentConfig, count: usize) -> Result<Vec<ReplicatedCurve>> {
    cfg.validate()?;
    if count == 0 {
        return Err(crate::error::ExpError::Config("replication count must be at least 1".into()));
    }
    let runs: Vec<(Vec<RegretRow>, f64, f64)> = (0..count)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let c = replication_config(cfg, k);
            let sc_cfg = c.scenario();
            let rec = Scenario::build(&sc_cfg)?.simulate(Dispatch::Randomized)?;
            let (l1, l2) = rec.max_lipschitz();
            Ok((regret_curve(&sc_cfg, &rec), l1, l2))
        })
        .collect::<Result<_>>()?;
    let l1 = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    let l2 = runs.iter().map(|r| r.2).fold(0.0, f64::max);
    let sc_cfg = cfg.scenario();
    let rounds = runs[0].0.len();
    Ok((0..rounds)
        .map(|i| {
            let col = |f: &dyn Fn(&RegretRow) -> Option<f64>| -> Option<(f64, f64)> {
                let v: Option<Vec<f64>> = runs.iter().map(|r| f(&r.0[i])).collect();
                v.map(|v| mean_stderr(&v))
            };
            let v_max = runs.iter().map(|r| r.0[i].variation).fold(0.0, f64::max);
            let round = runs[0].0[i].round;
            ReplicatedCurve {
                round,
                empirical: col(&|r| r.cumulative.dynamic),
                relaxed_proxy: col(&|r| r.cumulative.relaxed_proxy).expect("relaxed optimum recorded"),
                relaxed: col(&|r| r.cumulative.relaxed).expect("relaxed optimum recorded"),
                corollary1: restarted_bound(&bound_inputs(&sc_cfg, l1, l2, round, v_max)).ok(),
            }
        })
        .collect())
}

/// Writes `replicate.csv` and `manifest.txt`.
pub fn run_replications(cfg: &ExperimentConfig, count: usize, out: &Path) -> Result<Vec<ReplicatedCurve>> {
    let curve = replicate(cfg, count)?;
    create_dir(out)?;
    let mut t = Table::new([
        "round",
        "mean_regret_empirical",
        "stderr_regret_empirical",
        "mean_regret_relaxed_proxy",
        "stderr_regret_relaxed_proxy",
        "mean_regret_relaxed",
        "stderr_regret_relaxed",
        "corollary1_bound",
    ]);
    for c in &curve {
        t.push(vec![
            c.round.to_string(),
            fmt_opt(c.empirical.map(|v| v.0)),
            fmt_opt(c.empirical.map(|v| v.1)),
            fmt_num(c.relaxed_proxy.0),
            fmt_num(c.relaxed_proxy.1),
            fmt_num(c.relaxed.0),
            fmt_num(c.relaxed.1),
            fmt_opt(c.corollary1),
        ]);
    }
    t.write(&out.join("replicate.csv"))?;
    let vary = match cfg.replication.vary {
        Vary::Randomization => "randomization",
        Vary::All => "all",
    };
    let m = manifest(
        "replicate",
        cfg,
        &["replicate.csv"],
        vec![
            ("replications".into(), count.to_string()),
            ("vary".into(), vary.into()),
        ],
    );
    write_text(&out.join("manifest.txt"), &m.render())?;
    Ok(curve)
}
