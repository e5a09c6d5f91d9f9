//! Command-line front end and report serialization.
//!
//! Every subcommand produces a [`ReportDocument`]. JSON output has sorted
//! keys and floats rounded to 15 significant digits, so identical arguments
//! give byte-identical files; wall-clock timing is included only on request.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check or numerical
//! failure, 2 on invalid input, 3 when the dimension cap would be exceeded.

mod commands;
mod report;
pub mod suite;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;

pub use commands::{Cli, Command, Format};
pub use report::{matrix_json, round_floats, vector_json, Check, ReportDocument};

use crate::error::Error;
use crate::spin_numerics::Settings;

/// Environment variable overriding the dense-dimension cap.
pub const DIM_CAP_ENV: &str = "VALENCE_MPS_DIM_CAP";

/// Result of one CLI invocation.
#[derive(Clone, Debug)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub report: Option<ReportDocument>,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn failure(exit_code: i32, message: String) -> Self {
        CommandOutcome {
            exit_code,
            report: None,
            stdout: String::new(),
            stderr: message,
        }
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } => 3,
        Error::Numerical(_) | Error::FitResidual(_) => 1,
        _ => 2,
    }
}

fn settings_from_env() -> Result<Settings, String> {
    match std::env::var(DIM_CAP_ENV) {
        Ok(text) => text
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&cap| cap > 0)
            .map(Settings::with_cap)
            .ok_or_else(|| format!("{DIM_CAP_ENV} must be a positive integer, got `{text}`")),
        Err(_) => Ok(Settings::default()),
    }
}

/// Parses `argv` (including the program name), runs the command, renders the
/// report and writes `--out` if given.
pub fn run_command<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandOutcome { exit_code: 0, report: None, stdout: text, stderr: String::new() }
                }
                _ => CommandOutcome::failure(2, text),
            };
        }
    };
    let settings = match settings_from_env() {
        Ok(s) => s,
        Err(msg) => return CommandOutcome::failure(2, format!("error: {msg}\n")),
    };
    run_cli(&cli, &settings)
}

/// Runs an already parsed command line with explicit settings.
pub fn run_cli(cli: &Cli, settings: &Settings) -> CommandOutcome {
    let start = Instant::now();
    let mut doc = match commands::execute(&cli.command, settings) {
        Ok(doc) => doc,
        Err(e) => return CommandOutcome::failure(exit_code_for(&e), format!("error: {e}\n")),
    };
    if cli.timing {
        doc.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let json = doc.to_json();
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &json) {
            return CommandOutcome::failure(2, format!("error: cannot write {}: {e}\n", path.display()));
        }
    }
    let stdout = match cli.format {
        Format::Json => json,
        Format::Text => doc.to_text(),
    };
    CommandOutcome {
        exit_code: if doc.passed() { 0 } else { 1 },
        report: Some(doc),
        stdout,
        stderr: String::new(),
    }
}
