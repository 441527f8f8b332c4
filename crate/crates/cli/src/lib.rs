//! Command-line front end for the `dirnet` simulator.
//!
//! Every subcommand resolves its parameters from built-in defaults, an
//! optional `key = value` file and explicit flags, in that order, and writes
//! plain CSV (or a short text report). Exit codes: 0 success, 1 error,
//! 2 validity warning.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod metrics;
pub mod output;
pub mod range;
pub mod sweep;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::commands::Status;
use crate::error::{CliError, Result};

/// Environment variable bounding the sweep worker pool.
pub const THREADS_ENV: &str = "DIRNET_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_WARN: i32 = 2;

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}

fn dispatch(cli: Cli) -> Result<Status> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Spectrum {
            common,
            all_branches,
            both_sources,
            amplitudes,
        } => commands::spectrum(
            &common.params()?,
            all_branches,
            both_sources,
            amplitudes,
            common.out.as_deref(),
        ),
        Command::Dir { common } => commands::dir(&common.params()?, common.out.as_deref()),
        Command::Entangle {
            common,
            sweep,
            metrics,
        } => commands::entangle(&common.params()?, &sweep, &metrics, common.out.as_deref(), &mut stdout),
        Command::Sweep {
            common,
            axes,
            metrics,
        } => commands::sweep(&common.params()?, &axes, &metrics, common.out.as_deref()),
        Command::Validate { common, threshold } => {
            commands::validate(&common.params()?, threshold, &mut stdout)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
        }
    };
    let outcome = thread_pool().and_then(|pool| pool.install(|| dispatch(cli)));
    match outcome {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::Warn) => EXIT_WARN,
        Err(e) if e.is_broken_pipe() => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
