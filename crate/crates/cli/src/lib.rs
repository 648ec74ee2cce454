//! Batch driver for the `ccc` binary: argument parsing, problem loading,
//! the five commands and report emission.
//!
//! Exit codes: 0 all checks pass, 2 rejection with a witness, 3
//! configuration error, 4 internal identity violation.

pub mod commands;
pub mod config;
pub mod report;

use clap::Parser;

pub use commands::run;
pub use config::{Backend, Cli, CliError, Command, CommonOpts, Format, ModelKind, ProblemConfig};
pub use report::{Check, RunReport};

/// Parses `args`, runs the command, writes the report and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { config::EXIT_CONFIG } else { config::EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = ProblemConfig::new(&cli.command, &cli.opts)
        .and_then(|cfg| run(&cli.command, &cfg))
        .and_then(|report| report.emit().map(|_| report.exit_code));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ccc: {e}");
            e.exit_code()
        }
    }
}
