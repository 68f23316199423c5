use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cast_sim::runner::{
    apply_overrides, cmd_latency, cmd_simulate, load_config, Overrides, RunError,
};

/// Batch sparse-grant link simulator: Monte Carlo sweeps, analytic bounds,
/// and TDD latency tables, driven by TOML experiment configs.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV and manifest files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker thread cap (falls back to CAST_SIM_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the config's per-cell trial count.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo sweep and write per-cell statistics.
    Simulate(CommonArgs),
    /// Run the sweep with the analytic lower bound attached to every cell.
    Bound(CommonArgs),
    /// Evaluate the TDD latency table for the configured patterns.
    Latency(CommonArgs),
}

fn thread_cap(args: &CommonArgs) -> Option<usize> {
    args.threads.or_else(|| {
        std::env::var("CAST_SIM_THREADS").ok().and_then(|v| v.parse().ok())
    })
}

fn run(cli: Cli) -> Result<String, RunError> {
    let (args, force_bound, latency_only) = match &cli.command {
        Command::Simulate(a) => (a, false, false),
        Command::Bound(a) => (a, true, false),
        Command::Latency(a) => (a, false, true),
    };
    if let Some(threads) = thread_cap(args) {
        if threads == 0 {
            return Err(RunError::Config("--threads must be >= 1".into()));
        }
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let mut cfg = load_config(&args.config)?;
    apply_overrides(&mut cfg, Overrides { seed: args.seed, trials: args.trials })?;
    if latency_only {
        cmd_latency(cfg, &args.out)
    } else {
        cmd_simulate(cfg, &args.out, force_bound)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
