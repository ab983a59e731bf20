use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use fracstab_cli::commands::{self, Outcome};
use fracstab_cli::{exit, parse_config, resolve_out_dir, CliError, RunConfig, OUT_ENV};

/// Simulate fractional-order systems and check Lyapunov-type inequalities
/// along their trajectories.
#[derive(Debug, Parser)]
#[command(name = "fracstab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the configured system and write trajectory.csv
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured inequality suites
    Check {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a built-in example and run its stability checks
    Reproduce {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        example: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Step-halving self-convergence study of the configured system
    Convergence {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a gnuplot script for a CSV written by another subcommand
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

fn out_dir(flag: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    let env = env::var(OUT_ENV).ok();
    resolve_out_dir(flag, cfg.and_then(|c| c.output.as_deref()), env.as_deref())
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = load(&config)?;
            commands::simulate(&cfg, &out_dir(out.as_deref(), Some(&cfg)))
        }
        Command::Check { config, out } => {
            let cfg = load(&config)?;
            commands::check(&cfg, &out_dir(out.as_deref(), Some(&cfg)))
        }
        Command::Reproduce { example, out } => {
            commands::reproduce(example, &out_dir(out.as_deref(), None))
        }
        Command::Convergence { config, out } => {
            let cfg = load(&config)?;
            commands::convergence(&cfg, &out_dir(out.as_deref(), Some(&cfg)))
        }
        Command::Plot { csv, out } => commands::plot(&csv, &out_dir(out.as_deref(), None)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::USAGE,
            };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for line in &outcome.report {
                println!("{line}");
            }
            if !outcome.passed {
                eprintln!("fracstab: one or more checks failed");
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("fracstab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
