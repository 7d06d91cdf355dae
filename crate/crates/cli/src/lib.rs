//! Batch front end of `mfia`: synthesis, directory analysis to a feature
//! CSV, curve and mask export, and LOOCV classification reports.
//!
//! Exit codes: 0 success, 1 failure or partial failure, 2 bad invocation.

pub mod analyze;
pub mod args;
pub mod classify;
pub mod error;
pub mod output;
pub mod segment;
pub mod spectrum;
pub mod synth;
pub mod table;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
pub use error::{CliError, CliResult};

/// Whether every input was processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    Partial,
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => n,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Synth(a) => synth::run(&a),
        Command::Analyze(a) => analyze::run(&a),
        Command::Spectrum(a) => spectrum::run(&a),
        Command::Segment(a) => segment::run(&a),
        Command::Classify(a) => classify::run_classify(&a),
        Command::Anova(a) => classify::run_anova(&a),
    })
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("mfia: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
