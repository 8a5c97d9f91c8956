//! Command-line driver: closed-form analysis, seeded simulation, benchmark
//! comparison tables, and mechanism verification.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "mechlab",
    about = "Type-adjustable first-price sealed-bid auction laboratory",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form payoffs, optimal control value, and the Pareto verdict.
    Analyze {
        /// Impact coefficient of the control value on valuations.
        #[arg(long)]
        beta: f64,
    },
    /// Run the seeded Monte Carlo experiment described by a config file.
    Simulate {
        /// Path to the JSON scenario file.
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for the simulation (defaults to all cores).
        /// Results are identical for any value.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Compare adjusted payoffs against the reserve benchmark for several betas.
    Compare {
        /// Comma-separated list of impact coefficients.
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
    },
    /// Run the concavity, incentive, revelation, and best-response checks.
    Verify {
        /// Path to the JSON scenario file.
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze { beta } => commands::analyze(beta),
        Command::Simulate { config, workers } => commands::simulate(&config, workers),
        Command::Compare { beta } => commands::compare(&beta),
        Command::Verify { config } => commands::verify(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
