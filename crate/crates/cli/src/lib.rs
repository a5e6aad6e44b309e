//! The `pathfx` command line: every subcommand prints one JSON report (or DOT
//! text for `diagram`) on standard output and diagnostics on standard error.

mod args;
mod commands;
mod error;

use std::ffi::OsString;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

pub use args::{Cli, Command, Format, InterventionArgs};
pub use error::{CliError, EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC, EXIT_USAGE};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// The payload of a successful run.
pub(crate) enum Output {
    Report {
        model: String,
        intervention: Value,
        result: Value,
        seed: Option<u64>,
    },
    Dot(String),
    /// The DOT went to a file; nothing is printed.
    Written,
}

/// Runs the command line `args` (program name first) without touching the
/// process's standard streams.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliOutput {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => CliOutput {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let started = Instant::now();
    match commands::run(&cli.command) {
        Ok(Output::Report {
            model,
            intervention,
            result,
            seed,
        }) => {
            let mut report = json!({
                "schema": SCHEMA_VERSION,
                "command": echo,
                "model": model,
                "intervention": intervention,
                "result": result,
            });
            if let Some(seed) = seed {
                report["seed"] = json!(seed);
            }
            if cli.timing {
                report["wall_ms"] = json!(started.elapsed().as_secs_f64() * 1e3);
            }
            let mut stdout = serde_json::to_string_pretty(&report).expect("reports are valid JSON");
            stdout.push('\n');
            CliOutput {
                code: EXIT_OK,
                stdout,
                stderr: String::new(),
            }
        }
        Ok(Output::Dot(dot)) => CliOutput {
            code: EXIT_OK,
            stdout: dot,
            stderr: String::new(),
        },
        Ok(Output::Written) => CliOutput {
            code: EXIT_OK,
            stdout: String::new(),
            stderr: String::new(),
        },
        Err(e) => CliOutput {
            code: e.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", e.message),
        },
    }
}
