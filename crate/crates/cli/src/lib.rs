pub mod args;
pub mod cache;
pub mod commands;

use std::fmt;
use std::fs;
use std::process::ExitCode;

use args::{Cli, Format};
use cache::Cache;

/// Exit statuses: 0 pass, 1 a check failed, 2 usage error, 3 bad weights.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Degenerate(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Degenerate(_) | CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Degenerate(m) => write!(f, "degenerate input: {m}"),
            CliError::Internal(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<lpn_core::Error> for CliError {
    fn from(e: lpn_core::Error) -> Self {
        match e {
            lpn_core::Error::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Degenerate(e.to_string()),
        }
    }
}

/// Runs one invocation and returns its exit status.
pub fn run(cli: &Cli) -> ExitCode {
    let common = cli.command.common();
    if common.jobs > 0 {
        // only fails if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(common.jobs).build_global();
    }
    let cache = Cache::new(common.cache_dir.clone());
    let report = match commands::dispatch(&cli.command, &cache) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("lpn {}: {e}", cli.command.name());
            return ExitCode::from(e.exit_code());
        }
    };
    let body = match common.format {
        Format::Json => report.json + "\n",
        Format::Text => report.text,
    };
    match &common.out {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("lpn: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(if report.passed { 0 } else { 1 })
}
