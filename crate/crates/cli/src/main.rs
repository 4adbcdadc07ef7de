//! `ktopo`: run scenarios and sweeps, check and classify topology snapshots, aggregate results.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ktopo", version, about = "Incremental topology control for wireless sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the scenario of a config file for each of its seeds.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run only this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's algorithm string.
        #[arg(long)]
        algorithm: Option<String>,
    },
    /// Run the Cartesian product given by the config's `[sweep]` table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print constraint violations of a snapshot; exit status 1 unless strongly consistent.
    Check {
        snapshot: PathBuf,
        /// Algorithm string; defaults to the config's algorithm, else `ektc`.
        #[arg(long)]
        algorithm: Option<String>,
        /// Take k, w_min and the power model from this config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Classify an unclassified or weakly consistent snapshot and print a report.
    Tc {
        snapshot: PathBuf,
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the classified snapshot here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate the summaries in a result directory against a baseline algorithm.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "maxpower")]
        baseline: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, algorithm } => commands::run(&config, &out, seed, algorithm),
        Command::Sweep { config, out } => commands::sweep(&config, &out),
        Command::Check { snapshot, algorithm, config } => commands::check(&snapshot, algorithm, config.as_deref()),
        Command::Tc { snapshot, algorithm, config, out } => commands::tc(&snapshot, algorithm, config.as_deref(), out.as_deref()),
        Command::Report { out, baseline } => commands::report(&out, &baseline),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
