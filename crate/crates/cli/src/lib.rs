//! Experiment runner for the `tensordiag` verification suites.
//!
//! The binary is a thin wrapper around [`run`]; tests drive the same code.

pub mod args;
pub mod literal;
pub mod report;
pub mod runners;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};

use clap::Parser;

use args::{Cli, Config, Format, Output};
use report::Report;

/// Exit code when every check passed.
pub const EXIT_PASS: u8 = 0;
/// Exit code when a mathematical check failed.
pub const EXIT_FAIL: u8 = 1;
/// Exit code for an invalid configuration.
pub const EXIT_INVALID: u8 = 2;
/// Exit code when a resource budget would be exceeded.
pub const EXIT_BUDGET: u8 = 3;

pub fn write_report(report: &Report, config: &Config) -> std::io::Result<()> {
    let emit = |out: &mut dyn Write| -> std::io::Result<()> {
        let mut out = BufWriter::new(out);
        match config.format {
            Format::Json => report.write_json(&mut out)?,
            Format::Csv => report.write_csv(&mut out)?,
        }
        out.flush()
    };
    match &config.out {
        Output::Stdout => emit(&mut std::io::stdout().lock()),
        Output::File(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            emit(&mut File::create(path)?)
        }
    }
}

/// Parses `argv`, runs the command, writes the report and returns the exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_PASS
            };
        }
    };
    let config = match Config::resolve(cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INVALID;
        }
    };
    let report = match runners::execute(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = write_report(&report, &config) {
        eprintln!("error: cannot write output: {e}");
        return EXIT_INVALID;
    }
    let s = &report.summary;
    eprintln!(
        "{} records, {} passed, {} failed",
        s.records, s.passed, s.failed
    );
    if s.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
