//! Batch front end: reads coefficient specifications, runs experiments from
//! `pellip-core` and writes CSV or JSON reports.

pub mod args;
pub mod commands;
pub mod error;
pub mod range;
pub mod report;
pub mod spec;

use clap::Parser;

pub use args::{Cli, Command, Common, FormatArg};
pub use commands::{run, Outcome};
pub use error::{CliError, Result, EXIT_INPUT, EXIT_INTERNAL, EXIT_PASS, EXIT_VERIFICATION};
pub use range::parse_range;
pub use report::{emit_report, load_report, parse_report, Format, Report};
pub use spec::{load_spec, parse_spec, write_spec};

/// Parses arguments, runs, writes the report and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    let result = run(&cli).and_then(|outcome| {
        emit_report(&outcome.report, cli.common.format.into(), cli.common.out.as_deref())?;
        Ok(outcome.pass)
    });
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => {
            eprintln!("verification failed; see the report for details");
            EXIT_VERIFICATION
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}
