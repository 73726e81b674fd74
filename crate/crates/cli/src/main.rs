//! Command-line driver: ingest process specs, run constructions and
//! verifications, emit machine-readable reports.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "sigma-lab",
    version,
    about = "Exact construction and verification of the sigma-finite measure \
             associated with class-(Sigma) submartingales on finite path spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split the process into martingale and increasing parts and check the
    /// class structure
    Decompose {
        /// Process spec (JSON file)
        spec: PathBuf,
        /// Enumeration cap on the horizon
        #[arg(long, default_value_t = 16)]
        max_horizon: usize,
        /// Emit the main table as CSV instead of the JSON report
        #[arg(long)]
        csv: bool,
    },
    /// Build the level measures and verify the identity chain
    Qmeasure {
        /// Process spec (JSON file)
        spec: PathBuf,
        /// Override the spec's horizon (gallery kinds only)
        #[arg(long)]
        horizon: Option<usize>,
        /// Run the full verification matrix (densities, restrictions,
        /// monotonicity, totals, uniqueness probe)
        #[arg(long)]
        all_checks: bool,
        /// Enumeration cap on the horizon
        #[arg(long, default_value_t = 16)]
        max_horizon: usize,
        /// Emit the law table as CSV instead of the JSON report
        #[arg(long)]
        csv: bool,
    },
    /// Monte Carlo estimates: marginal expectations (--n) or the
    /// diffusive-scaling probe (--t with --scaling-m)
    Mc {
        /// Process spec (JSON file)
        spec: PathBuf,
        /// Estimate the depth-n marginal expectation of the spec's process
        #[arg(long)]
        n: Option<usize>,
        /// Sample count
        #[arg(long, default_value_t = 100_000)]
        count: u64,
        /// Base seed; fixed seeds give byte-identical reports
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Walk steps per unit of time for the scaling probe
        #[arg(long)]
        scaling_m: Option<u32>,
        /// Target time for the scaling probe
        #[arg(long)]
        t: Option<f64>,
        /// Cap under which exact enumeration targets are computed
        #[arg(long, default_value_t = 16)]
        max_horizon: usize,
        /// Emit the estimate as CSV instead of the JSON report
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Decompose {
            spec,
            max_horizon,
            csv,
        } => commands::cmd_decompose(&spec, max_horizon, csv),
        Command::Qmeasure {
            spec,
            horizon,
            all_checks,
            max_horizon,
            csv,
        } => commands::cmd_qmeasure(&spec, horizon, all_checks, max_horizon, csv),
        Command::Mc {
            spec,
            n,
            count,
            seed,
            scaling_m,
            t,
            max_horizon,
            csv,
        } => commands::cmd_mc(&spec, n, count, seed, scaling_m, t, max_horizon, csv),
    };
    ExitCode::from(code)
}
