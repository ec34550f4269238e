//! Batch experiment runner.
//!
//! Exit codes: 0 success, 1 partial failure (see `failures.csv`), 2 config
//! error.

mod config;
mod experiments;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Experiment, ExperimentConfig, RawConfig, Sweep as SweepConfig};
use experiments::{CommandError, Report};
use sweep::Sweep;

#[derive(Parser)]
#[command(name = "hecool", version, about = "Heat-exchange VQE experiment sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted complete-graph MaxCut across ansatze and graph seeds.
    Maxcut(RunArgs),
    /// dVQE on the impurity chain over the (d, h, frozen) grid.
    Heisenberg(RunArgs),
    /// Exact ground energies and best cuts for the test suite.
    OracleFixtures(RunArgs),
}

/// Every config key can also be given as a flag of the same name, in the
/// config's value syntax (`--h "[0, 2, 4]"`).
#[derive(Args)]
struct RunArgs {
    /// `key = value` experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Rerun cells that already have results.
    #[arg(long)]
    force: bool,
    /// Optimizer seed (maxcut), or a single-entry `seeds` list (heisenberg).
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    ansatze: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long = "eval_mode")]
    eval_mode: Option<String>,
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    coupling: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    frozen: Option<String>,
    #[arg(long = "graph_n")]
    graph_n: Option<String>,
}

impl RunArgs {
    fn load(&self, experiment: Experiment) -> Result<ExperimentConfig, ConfigError> {
        let mut raw = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
                RawConfig::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?
            }
            None => RawConfig::default(),
        };
        let overrides = [
            ("n", &self.n),
            ("seeds", &self.seeds),
            ("budget", &self.budget),
            ("ansatze", &self.ansatze),
            ("reps", &self.reps),
            ("eval_mode", &self.eval_mode),
            ("shots", &self.shots),
            ("coupling", &self.coupling),
            ("h", &self.h),
            ("d", &self.d),
            ("frozen", &self.frozen),
            ("graph_n", &self.graph_n),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            raw.set("out", &out.to_string_lossy())?;
        }
        if let Some(seed) = self.seed {
            match experiment {
                Experiment::Maxcut => raw.set("seed", &seed.to_string())?,
                Experiment::Heisenberg => raw.set("seeds", &format!("[{seed}]"))?,
                Experiment::OracleFixtures => {
                    return Err(ConfigError("--seed: oracle-fixtures runs no optimizer".into()))
                }
            }
        }
        ExperimentConfig::from_raw(experiment, raw)
    }
}

fn run(experiment: Experiment, args: &RunArgs) -> Result<Report, CommandError> {
    let cfg = args.load(experiment)?;
    if args.workers == Some(0) {
        return Err(ConfigError("--workers: must be at least 1".into()).into());
    }
    sweep::prepare_out(&cfg.out)
        .map_err(|e| ConfigError(format!("output directory {}: {e}", cfg.out.display())))?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let runner = Sweep {
        out: cfg.out.clone(),
        workers,
        force: args.force,
    };
    match &cfg.sweep {
        SweepConfig::Maxcut(s) => experiments::cmd_maxcut(s, &runner),
        SweepConfig::Heisenberg(s) => experiments::cmd_heisenberg(s, &runner),
        SweepConfig::OracleFixtures(f) => experiments::cmd_oracle_fixtures(f, &cfg.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match &cli.command {
        Command::Maxcut(a) => (Experiment::Maxcut, a),
        Command::Heisenberg(a) => (Experiment::Heisenberg, a),
        Command::OracleFixtures(a) => (Experiment::OracleFixtures, a),
    };
    match run(experiment, args) {
        Ok(r) => {
            eprintln!(
                "{}: {} cells, {} reused, {} failed",
                experiment.name(),
                r.cells,
                r.reused,
                r.failed
            );
            if r.failed == 0 {
                ExitCode::SUCCESS
            } else {
                eprintln!("failed cells are listed in {}", sweep::FAILURES_FILE);
                ExitCode::from(1)
            }
        }
        Err(CommandError::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(CommandError::Output(e)) => {
            eprintln!("output error: {e}");
            ExitCode::from(1)
        }
    }
}
