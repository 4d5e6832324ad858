//! Command-line front end. Every invocation loads its state from a JSON file,
//! applies one command and writes the state back; there is no daemon.
//!
//! Exit codes: 0 on success, 1 on a domain error (error JSON on stderr),
//! 2 on a usage error.

mod args;
mod commands;

use std::io::Write;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

pub use args::Cli;
pub use commands::{demo_report, CliError};

/// Document printed on stdout for every parsed invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub timestamp: String,
    pub seed: Option<u64>,
    pub result: Value,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorDocument>,
    pub exit_code: i32,
}

/// Error document written to stderr.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ErrorDocument {
    pub code: String,
    pub message: String,
}

/// Output of a successful command, before it is wrapped in a report.
pub(crate) struct Outcome {
    pub result: Value,
    pub warnings: Vec<String>,
}

pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let command: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let seed = cli.seed();
    let (outcome, error) = match commands::execute(&cli) {
        Ok(o) => (o, None),
        Err(e) => (Outcome { result: Value::Null, warnings: Vec::new() }, Some(e)),
    };
    let exit_code = if error.is_some() { 1 } else { 0 };
    let error = error.map(|e| ErrorDocument { code: e.code, message: e.message });
    if let Some(e) = &error {
        let _ = writeln!(err, "{}", serde_json::to_string(e).expect("error json"));
    }
    let report = RunReport {
        command,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        seed,
        result: outcome.result,
        warnings: outcome.warnings,
        error,
        exit_code,
    };
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report json"));
    exit_code
}
