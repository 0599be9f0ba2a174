use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lot::cli::{self, LoadedConfig, Outcome};
use lot::suites::SuiteKind;
use lot::LotError;

/// Optimal transport for costs induced by Tonelli Lagrangians.
#[derive(Parser)]
#[command(name = "lot", disable_help_flag = false)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimizing cost between two points, with differentials and the
    /// minimizer's nodes.
    Cost {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated chart coordinates of the source point.
        #[arg(long)]
        x: String,
        /// Comma-separated chart coordinates of the target point.
        #[arg(long)]
        y: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact plan, dual potentials, induced map, and gates.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Displacement interpolation stopped at the given times.
    Interp {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated stop times inside [0, t].
        #[arg(long)]
        s: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded invariant suites.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// flows, legendre, semiconcavity, twist, duality, or all.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(config: &PathBuf) -> Result<LoadedConfig, LotError> {
    cli::load_config(config)
}

fn run() -> Result<Outcome, LotError> {
    // Usage errors are input errors; clap's default exit code says
    // otherwise, so parsing is intercepted.
    let parsed = Cli::try_parse().map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            print!("{e}");
            std::process::exit(0);
        }
        _ => LotError::Input(e.to_string()),
    })?;
    match parsed.command {
        Command::Cost { config, x, y, out } => {
            cli::cmd_cost(&load(&config)?, &x, &y, out.as_deref())
        }
        Command::Solve { config, out } => cli::cmd_solve(&load(&config)?, out.as_deref()),
        Command::Interp { config, s, out } => {
            cli::cmd_interp(&load(&config)?, &s, out.as_deref())
        }
        Command::Verify { config, suite, out } => {
            let kind = SuiteKind::parse(&suite)?;
            cli::cmd_verify(&load(&config)?, kind, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(outcome) => {
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            if outcome.pass {
                println!("PASS");
                ExitCode::SUCCESS
            } else {
                println!("FAIL");
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprint!("{}", cli::error_json(&err));
            ExitCode::from(cli::exit_code_for(&err) as u8)
        }
    }
}
