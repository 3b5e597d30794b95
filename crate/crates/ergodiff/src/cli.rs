//! Command-line front end.
//!
//! Four subcommands: `run` executes one simulation and writes its
//! outputs, `compare` fans seeded runs over several methods and
//! summarizes them, `snapshot` dumps the fields behind a run at chosen
//! steps, and `defaults` prints the built-in configuration fully
//! resolved. Every subcommand is deterministic given the config, seed,
//! and overrides; the only nondeterministic output is wall-clock timing
//! on stdout.
//!
//! Outputs land under `--out-dir` in a directory named by the config
//! hash and base seed, so distinct configurations never overwrite each
//! other and re-running the same one reproduces the same files.
//!
//! Exit codes: 0 success, 1 for configuration problems (bad file, bad
//! key, bad value), 2 for runtime failures like a solver blow-up.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::FileConfig;
use crate::error::{Error, Result};
use crate::io::{self, SummaryRow};
use crate::sim::{self, MethodOutcome};

#[derive(Debug, Parser)]
#[command(name = "ergodiff", version, about = "Multi-agent ergodic coverage simulator")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Execute one simulation run and write its outputs.
    Run(RunArgs),
    /// Run every configured method over shared seeds and summarize.
    Compare(CompareArgs),
    /// Dump the target, coverage, error, and potential fields at
    /// chosen steps of one run.
    Snapshot(SnapshotArgs),
    /// Print the built-in configuration, fully resolved.
    Defaults,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file (built-in defaults when omitted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for multi-run commands (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Root directory for outputs.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Dotted-path config override, e.g. `control.v_m=2.0` (repeatable).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<FileConfig> {
        let text = match &self.config {
            Some(path) => Some(fs::read_to_string(path)?),
            None => None,
        };
        let mut overrides = self.overrides.clone();
        if let Some(seed) = self.seed {
            // routed through the override path so it lands in the
            // config hash like any other change
            overrides.push(format!("run.seed={seed}"));
        }
        FileConfig::from_sources(text.as_deref(), &overrides)
    }

    /// Create and return `out_dir/<hash8>-s<seed>`.
    fn run_dir(&self, cfg: &FileConfig) -> Result<PathBuf> {
        let dir = self.out_dir.join(format!("{}-s{}", cfg.hash8()?, cfg.run.seed));
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated method list, replacing the `[compare]` section's.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Runs per method, replacing the `[compare]` section's.
    #[arg(long)]
    n_runs: Option<usize>,
}

#[derive(Debug, Args)]
struct SnapshotArgs {
    #[command(flatten)]
    common: Common,
    /// Steps to dump (default: 0 and the final step).
    #[arg(long, value_delimiter = ',')]
    steps: Vec<usize>,
}

/// Parse arguments and dispatch. Returns the process exit code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version print to stdout and succeed; real
            // usage errors are configuration errors
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Snapshot(args) => cmd_snapshot(args),
        Command::Defaults => cmd_defaults(),
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.common.config()?;
    let sim_cfg = cfg.sim_config()?;
    let mu = cfg.target_density()?;
    let dir = args.common.run_dir(&cfg)?;

    let result = sim::run(&sim_cfg, &mu)?;
    io::write_error_series(&dir.join("error.csv"), &result.error_series, sim_cfg.control.dt)?;
    io::write_trajectory(&dir.join("trajectory.csv"), &result.trajectory)?;
    io::write_field(&dir.join("mu.fld"), mu.field())?;
    io::write_field(&dir.join("coverage.fld"), &result.final_coverage)?;
    io::write_field(&dir.join("error.fld"), &result.final_error)?;
    io::write_field(&dir.join("potential.fld"), &result.final_potential)?;

    println!(
        "{} on {}, {} agents, {} steps, seed {}",
        sim_cfg.method.name(),
        mu.descriptor(),
        sim_cfg.n_agents,
        sim_cfg.n_steps,
        sim_cfg.seed
    );
    println!(
        "E(0) = {:.6}, final E = {:.6}, wall time {:.2?}",
        result.error_series[0],
        result.error_series.last().unwrap(),
        result.wall_time
    );
    println!("outputs: {}", dir.display());
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let mut cfg = args.common.config()?;
    if !args.methods.is_empty() {
        cfg.compare.methods = args.methods.clone();
    }
    if let Some(n_runs) = args.n_runs {
        cfg.compare.n_runs = n_runs;
    }
    let exp = cfg.experiment_config(args.common.workers)?;
    let mu = cfg.target_density()?;
    let dir = args.common.run_dir(&cfg)?;

    let summary = sim::experiment(&exp, &mu)?;
    let dt = exp.base.control.dt;
    let rows = summary.outcomes.iter().flat_map(|outcome| {
        outcome.mean_e.iter().zip(&outcome.std_e).enumerate().map(move |(step, (m, s))| {
            SummaryRow {
                step,
                time: step as f64 * dt,
                method: outcome.method.name(),
                mean_e: *m,
                std_e: *s,
            }
        })
    });
    io::write_summary(&dir.join("summary.csv"), rows)?;
    for outcome in &summary.outcomes {
        write_outcome_runs(&dir, outcome, dt)?;
    }

    println!(
        "{} on {}: {} runs per method, shared starts: {}",
        cfg.compare
            .methods
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .join(" vs "),
        mu.descriptor(),
        exp.n_runs,
        exp.shared_initial_positions
    );
    println!("method  mean final E  std");
    for outcome in &summary.outcomes {
        match (outcome.mean_e.last(), outcome.std_e.last()) {
            (Some(mean), Some(std)) => {
                println!("{:<7} {:<13.6} {:.6}", outcome.method.name(), mean, std)
            }
            _ => println!("{:<7} all runs failed", outcome.method.name()),
        }
    }
    println!("outputs: {}", dir.display());
    Ok(())
}

/// Per-run error and trajectory files under `<method>-r<index>/`.
fn write_outcome_runs(dir: &Path, outcome: &MethodOutcome, dt: f64) -> Result<()> {
    for (r, run) in outcome.runs.iter().enumerate() {
        match run {
            Ok(result) => {
                let run_dir = dir.join(format!("{}-r{r}", outcome.method.name()));
                fs::create_dir_all(&run_dir)?;
                io::write_error_series(&run_dir.join("error.csv"), &result.error_series, dt)?;
                io::write_trajectory(&run_dir.join("trajectory.csv"), &result.trajectory)?;
            }
            Err(message) => {
                eprintln!("{} run {r} failed: {message}", outcome.method.name());
            }
        }
    }
    Ok(())
}

fn cmd_snapshot(args: &SnapshotArgs) -> Result<()> {
    let cfg = args.common.config()?;
    let sim_cfg = cfg.sim_config()?;
    let mu = cfg.target_density()?;

    let mut steps =
        if args.steps.is_empty() { vec![0, sim_cfg.n_steps] } else { args.steps.clone() };
    steps.sort_unstable();
    steps.dedup();
    if let Some(bad) = steps.iter().find(|s| **s > sim_cfg.n_steps) {
        return Err(Error::config(
            "snapshot.steps",
            format!("step {bad} is beyond n_steps = {}", sim_cfg.n_steps),
        ));
    }

    let dir = args.common.run_dir(&cfg)?;
    io::write_field(&dir.join("mu.fld"), mu.field())?;
    // a run is a deterministic function of its seed, so truncating
    // n_steps reproduces the state at any earlier step exactly
    let mut last = None;
    for &step in &steps {
        let mut truncated = sim_cfg.clone();
        truncated.n_steps = step;
        let result = sim::run(&truncated, &mu)?;
        io::write_field(&dir.join(format!("coverage_{step}.fld")), &result.final_coverage)?;
        io::write_field(&dir.join(format!("error_{step}.fld")), &result.final_error)?;
        io::write_field(&dir.join(format!("potential_{step}.fld")), &result.final_potential)?;
        println!("step {step}: E = {:.6}", result.error_series.last().unwrap());
        last = Some(result);
    }
    if let Some(result) = last {
        io::write_trajectory(&dir.join("trajectory.csv"), &result.trajectory)?;
    }
    println!("outputs: {}", dir.display());
    Ok(())
}

fn cmd_defaults() -> Result<()> {
    print!("{}", FileConfig::default().resolved()?.to_toml()?);
    Ok(())
}
