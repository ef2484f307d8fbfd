//! Command-line front end for `eigpert`.
//!
//! Exit codes: 0 success, 2 parse or flag error, 3 eigenvalue not simple,
//! 4 numerical failure, 5 normalization scheme error. Failures print a JSON
//! object `{"error": {"kind", "message", "exit_code"}}` on standard error.

pub mod args;
pub mod commands;
pub mod document;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::Parser;
use eigpert::Error as CoreError;
use serde::Serialize;
use thiserror::Error;

use crate::args::{Cli, Command};
use crate::document::{DocumentError, ReportDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_SIMPLE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_SCHEME: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Document(_) => EXIT_USAGE,
            CliError::Core(e) => core_exit_code(e),
        }
    }

    pub fn kind(&self) -> String {
        match self {
            CliError::Usage(_) => "Usage".into(),
            CliError::Document(_) => "Document".into(),
            CliError::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
            }
        }
    }
}

pub fn core_exit_code(e: &CoreError) -> i32 {
    use CoreError::*;
    match e {
        NotSquare { .. } | DimensionMismatch { .. } | EmptyDimension | DegreeTooHigh { .. } | InvalidArgument(_) => {
            EXIT_USAGE
        }
        NotSimple { .. } | PairingAmbiguous(_) | NearOrthogonalPair { .. } => EXIT_NOT_SIMPLE,
        NotVerifiable(_) | PinnedEntryZero { .. } | IsotropicVector { .. } | AmbiguousSign => EXIT_SCHEME,
        NonFinite
        | NonConvergence { .. }
        | SingularToTolerance { .. }
        | EvaluatorFailure(_)
        | ReorderFailure
        | BranchCutViolation { .. }
        | MatchingFailure { .. }
        | ResolventBreakdown(_)
        | NonIntegerResult { .. } => EXIT_NUMERICAL,
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
    exit_code: i32,
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

fn report_error(stderr: &mut dyn Write, kind: &str, message: &str, exit_code: i32) -> i32 {
    let obj = ErrorObject {
        error: ErrorBody {
            kind,
            message,
            exit_code,
        },
    };
    let _ = writeln!(stderr, "{}", serde_json::to_string(&obj).expect("error object serializes"));
    exit_code
}

/// Runs one report command.
pub fn execute(command: &Command) -> Result<ReportDocument, CliError> {
    match command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Verify(a) => commands::verify(a),
        Command::DefectiveDemo(a) => commands::defective(a),
        Command::ContourCheck(a) => commands::contour_check(a),
    }
}

fn output_path(command: &Command) -> Option<&std::path::Path> {
    match command {
        Command::Analyze(a) => a.source.output.as_deref(),
        Command::Verify(a) => a.source.output.as_deref(),
        Command::DefectiveDemo(a) => a.output.as_deref(),
        Command::ContourCheck(a) => a.source.output.as_deref(),
    }
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            return report_error(stderr, "Usage", rendered.trim_end(), EXIT_USAGE);
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => return report_error(stderr, &e.kind(), &e.to_string(), e.exit_code()),
    };
    let text = report.to_json();
    let written = match output_path(&cli.command) {
        Some(path) => fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(msg) => report_error(stderr, "Io", &msg, EXIT_USAGE),
    }
}
