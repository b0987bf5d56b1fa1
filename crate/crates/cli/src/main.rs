use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use structbe::experiments::Experiment;
use structbe_cli::{CliError, Output};

/// Structured backward errors for saddle-point systems.
///
/// Exit status: 0 on success, 2 when the backward error is undefined
/// (or a verification fails), 1 on input errors. `STRUCTBE_RANK_TOL` and
/// `STRUCTBE_CONSISTENCY_TOL` override the numerical tolerances.
#[derive(Parser)]
#[command(name = "structbe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Backward errors and minimal perturbations of an approximate solution
    Compute {
        #[arg(long)]
        manifest: PathBuf,
        /// Stacked [x; y], one value per line
        #[arg(long)]
        solution: PathBuf,
        /// Write dA.mtx, dB.mtx, dC.mtx, df.vec and dg.vec here
        #[arg(long)]
        dump_perturbations: Option<PathBuf>,
    },
    /// Check that a perturbation set makes the solution exact
    Verify {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Directory holding dA.mtx, dB.mtx, dC.mtx, df.vec and dg.vec
        #[arg(long)]
        perturbations: PathBuf,
    },
    /// Run a reference instance (ex71, ex56) or a sweep (ex72, ex73)
    Experiment {
        #[arg(long)]
        name: Experiment,
        /// `a:step:b`, `a:b` or a comma-separated list
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Backward error of a weighted regularized least-squares pair [r; z]
    Wrls {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Write dK.mtx and df.vec here
        #[arg(long)]
        dump_perturbations: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Compute {
            manifest,
            solution,
            dump_perturbations,
        } => structbe_cli::compute(&manifest, &solution, dump_perturbations.as_deref()),
        Command::Verify {
            manifest,
            solution,
            perturbations,
        } => structbe_cli::verify(&manifest, &solution, &perturbations),
        Command::Experiment {
            name,
            sizes,
            seed,
            out,
        } => structbe_cli::experiment(name, sizes.as_deref(), seed, out.as_deref()),
        Command::Wrls {
            manifest,
            solution,
            dump_perturbations,
        } => structbe_cli::wrls(&manifest, &solution, dump_perturbations.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("structbe: {e}");
            ExitCode::from(1)
        }
    }
}
