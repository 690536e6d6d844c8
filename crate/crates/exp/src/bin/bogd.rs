use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bogd::regret::BoundInputs;
use bogd_exp::config::{self, parse_seed_override, ExperimentConfig, SyntheticConfig};
use bogd_exp::output::create_dir;
use bogd_exp::{bounds, scenario, synthetic, Result};
use clap::{Args, Parser, Subcommand};

/// Binary online gradient descent experiments.
#[derive(Debug, Parser)]
#[command(name = "bogd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Replace a named seed, e.g. `randomization=7`. Repeatable.
    #[arg(long = "seed-override", value_parser = parse_seed_override)]
    seed_override: Vec<(String, u64)>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one TCL scenario.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Average the TCL regret curve over replications.
    Replicate {
        #[command(flatten)]
        common: Common,
        /// Overrides `replication.count`.
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Small-n regret validation on quadratic losses.
    Synthetic {
        #[command(flatten)]
        common: Common,
        /// Overrides `replication.count`.
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Evaluate the regret bounds for given constants.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        l1: f64,
        #[arg(long)]
        l2: f64,
        #[arg(long)]
        tau: u64,
        /// Restart block length T.
        #[arg(long)]
        block: u64,
        /// Cumulative variation V.
        #[arg(long, default_value_t = 0.0)]
        variation: f64,
        /// Also write `bounds.csv` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_experiment(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg: ExperimentConfig = config::load(&common.config)?;
    cfg.apply_seed_overrides(&common.seed_override)?;
    cfg.validate()?;
    Ok(cfg)
}

fn load_synthetic(common: &Common) -> Result<SyntheticConfig> {
    let mut cfg: SyntheticConfig = config::load(&common.config)?;
    for (name, value) in &common.seed_override {
        cfg.seeds.set(name, *value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(out: &Path, what: &str) {
    println!("{what} -> {}", out.display());
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { common } => {
            let cfg = load_experiment(&common)?;
            let s = scenario::run_scenario(&cfg, &common.out)?;
            report(
                &common.out,
                &format!(
                    "run: {} rounds, relative RMSE {:.4} (bOGD) vs {:.4} (relaxed)",
                    s.rounds, s.bogd.relative_rmse, s.relaxed.relative_rmse
                ),
            );
        }
        Command::Replicate { common, replications } => {
            let cfg = load_experiment(&common)?;
            let count = replications.unwrap_or(cfg.replication.count);
            scenario::run_replications(&cfg, count, &common.out)?;
            report(&common.out, &format!("replicate: {count} replications"));
        }
        Command::Synthetic { common, replications } => {
            let cfg = load_synthetic(&common)?;
            let count = replications.unwrap_or(cfg.replication.count);
            synthetic::run_synthetic(&cfg, count, &common.out)?;
            report(&common.out, &format!("synthetic: {count} replications"));
        }
        Command::Bounds { n, a, l1, l2, tau, block, variation, out } => {
            let table = bounds::bounds_table(&BoundInputs { n, a, l1, l2, tau, block, variation });
            print!("{}", table.to_csv_string());
            if let Some(dir) = out {
                create_dir(&dir)?;
                table.write(&dir.join("bounds.csv"))?;
            }
        }
    }
    Ok(())
}

fn fail(category: &str, msg: &str, code: u8) -> ExitCode {
    eprintln!("error[{category}]: {}", msg.trim().replace('\n', " "));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return fail("usage", first.trim_start_matches("error: "), 2);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.category(), &e.to_string(), e.exit_code() as u8),
    }
}
