//! Library side of the `hflow` command line tool: configuration files,
//! experiment runs, sweeps, plots and the one-shot subcommands.

pub mod commands;
pub mod config;
pub mod plot;
pub mod run;
pub mod sweep;

use std::io;

/// Every monitor passed.
pub const EXIT_PASS: u8 = 0;
/// The run completed but at least one monitor failed.
pub const EXIT_FAIL: u8 = 1;
/// Invalid configuration, unreadable input or a module error.
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {}{}{message}", line.map(|l| format!("line {l}, ")).unwrap_or_default(), if key.is_empty() { String::new() } else { format!("key `{key}`: ") })]
    Config { path: String, line: Option<usize>, key: String, message: String },

    #[error("{0}: {1}")]
    Io(String, #[source] io::Error),

    #[error(transparent)]
    Core(#[from] hflow::Error),
}
