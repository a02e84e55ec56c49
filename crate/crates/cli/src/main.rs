//! born-lab: scenario runner and verification CLI for the Born-rule toy
//! models. Exit codes: 0 pass, 1 error, 2 statistical fail.

mod check;
mod output;
mod report;
mod run;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "born-lab", version, about = "Many-minds Born-rule toy-model laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write CSV/JSON artifacts.
    Run {
        /// Scenario file (`key = value` lines, `#` comments).
        file: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's mode (`exact` or `mc`/`monte-carlo`).
        #[arg(long)]
        mode: Option<String>,
        /// Output directory for the artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print a verification report as JSON.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Swap/counterswap invariance of the T-branch Schmidt state.
    Envariance {
        #[arg(long = "T", visible_alias = "levels")]
        levels: usize,
    },
    /// Frequency-operator expectations against the Born weights.
    Frequency {
        /// Comma-separated weights, e.g. `1/3,2/3`.
        #[arg(long)]
        weights: String,
        #[arg(long = "N", visible_alias = "n")]
        n: u32,
        /// Comma-separated outcome names (default ↑,↓ for two outcomes).
        #[arg(long)]
        outcomes: Option<String>,
    },
    /// Counterswap + erasure chain on a two-branch observer state.
    Wallace {
        #[arg(long)]
        weights: String,
        #[arg(long)]
        outcomes: Option<String>,
    },
}

fn init_thread_pool() {
    let threads = std::env::var("BORN_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        // ignore failure when a pool is already installed (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run {
            file,
            seed,
            mode,
            out,
        } => {
            let mut scenario = scenario::parse_scenario(&file)?;
            if let Some(seed) = seed {
                scenario.seed = seed;
            }
            if let Some(mode) = mode {
                scenario.mode = scenario::Mode::parse(&mode)
                    .ok_or_else(|| anyhow::anyhow!("mode must be `exact` or `monte-carlo`"))?;
            }
            let pass = run::run_scenario(&scenario, &out)?;
            let summary_path = out.join(&scenario.json_path);
            println!(
                "{}: {} (summary: {})",
                scenario.name,
                if pass { "pass" } else { "fail" },
                summary_path.display()
            );
            Ok(pass)
        }
        Command::Check { what } => {
            let (value, pass) = match what {
                CheckCommand::Envariance { levels } => check::check_envariance(levels)?,
                CheckCommand::Frequency {
                    weights,
                    n,
                    outcomes,
                } => check::check_frequency(&weights, n, outcomes.as_deref())?,
                CheckCommand::Wallace { weights, outcomes } => {
                    check::check_wallace(&weights, outcomes.as_deref())?
                }
            };
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(pass)
        }
    }
}
