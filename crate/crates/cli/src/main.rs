use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rfi_cli::runner::{run_scenario, RunOptions};
use rfi_cli::scenario::load_scenario;

/// Run seeded random-function-iteration feasibility experiments from
/// declarative scenario files.
#[derive(Parser)]
#[command(name = "rfi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: ensemble, diagnostics, CSV outputs and report.
    Run {
        /// Path to the scenario file.
        scenario: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (scheduling only; results are identical for any
        /// count).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a scenario's assertions without writing any files.
    Verify {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List built-in problem kinds, kernels and bundled scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
            threads,
        } => execute(&scenario, seed, out, threads, true),
        Command::Verify {
            scenario,
            seed,
            threads,
        } => execute(&scenario, seed, None, threads, false),
        Command::List => {
            print!("{}", rfi_cli::list_builtin());
            ExitCode::SUCCESS
        }
    }
}

fn execute(
    path: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    write_outputs: bool,
) -> ExitCode {
    let mut scenario = match load_scenario(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    if let Some(out) = out {
        scenario.out_dir = out;
    }

    let opts = RunOptions { write_outputs };
    let run = || run_scenario(&scenario, &opts);
    let outcome = match threads {
        Some(n) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("runtime error: {e}");
                    return ExitCode::from(3);
                }
            };
            pool.install(run)
        }
        None => run(),
    };
    match outcome {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
