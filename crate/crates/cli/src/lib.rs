//! Library side of the `fracstab` binary: config parsing, CSV output and the
//! subcommands. `main.rs` only parses arguments and maps results to exit codes.

pub mod commands;
pub mod config;
pub mod csv_io;

use std::io;
use std::path::{Path, PathBuf};

use fracstab_core::ineq::suite::SuiteError;
use fracstab_core::presets::PresetError;
use fracstab_core::solver::SolveError;
use thiserror::Error;

pub use config::{parse_config, CheckSpec, RunConfig};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "FRACSTAB_OUT";
pub const DEFAULT_OUT_DIR: &str = "fracstab_out";

pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const DIVERGENCE: u8 = 2;
    pub const IO: u8 = 3;
    pub const UNKNOWN_CHECK: u8 = 4;
    pub const CHECKS_FAILED: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", config_message(*.line, .message))]
    Config { line: Option<usize>, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: malformed CSV: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("unknown check '{0}'")]
    UnknownCheck(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Preset(#[from] PresetError),
    #[error(transparent)]
    Suite(SuiteError),
}

fn config_message(line: Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("config line {l}: {message}"),
        None => format!("config: {message}"),
    }
}

fn solve_exit_code(e: &SolveError) -> u8 {
    match e {
        SolveError::Divergence { .. } => exit::DIVERGENCE,
        SolveError::AtStep { source, .. } => solve_exit_code(source),
        _ => exit::USAGE,
    }
}

impl CliError {
    pub fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        CliError::Config {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } | CliError::Csv { .. } => exit::IO,
            CliError::UnknownCheck(_) => exit::UNKNOWN_CHECK,
            CliError::Solve(e) => solve_exit_code(e),
            CliError::Preset(PresetError::Solve(e)) => solve_exit_code(e),
            CliError::Preset(PresetError::Unknown(_)) => exit::USAGE,
            CliError::Preset(_) => exit::USAGE,
            CliError::Suite(SuiteError::Unknown(_)) => exit::UNKNOWN_CHECK,
            CliError::Suite(_) => exit::USAGE,
        }
    }
}

impl From<SuiteError> for CliError {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Unknown(name) => CliError::UnknownCheck(name),
            other => CliError::Suite(other),
        }
    }
}

/// Output directory: the `--out` flag, then the config's `output`, then
/// `$FRACSTAB_OUT`, then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>, env: Option<&str>) -> PathBuf {
    flag.or(config)
        .map(Path::to_path_buf)
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}
