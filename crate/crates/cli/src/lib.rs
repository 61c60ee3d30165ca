//! Command-line front end for `quasifix-core`.
//!
//! [`run`] parses arguments and dispatches; the binary is a thin wrapper
//! so tests can drive commands in-process.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde::Serialize;

pub mod commands;
pub mod gallery;
pub mod inputs;
pub mod manifest;

use commands::{CertifyArgs, CheckAxiomsArgs, ClassifyArgs, DemoArgs, GalleryArgs, SolveArgs};
use inputs::GlobalOpts;

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code when a check fails or a run does not converge.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for malformed arguments or inputs.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "quasifix",
    version,
    about = "Algebra-valued asymmetric metrics and fixed points"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check the metric axioms on sample points.
    CheckAxioms(CheckAxiomsArgs),
    /// Classify forward and backward convergence of a sequence.
    Classify(ClassifyArgs),
    /// Verify or search for a contraction certificate.
    Certify(CertifyArgs),
    /// Picard iteration under a certificate.
    Solve(SolveArgs),
    /// Solve the integral equation on a grid.
    DemoIntegral(DemoArgs),
    /// Run every bundled example and report PASS/FAIL.
    Gallery(GalleryArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckAxioms(_) => "check-axioms",
            Command::Classify(_) => "classify",
            Command::Certify(_) => "certify",
            Command::Solve(_) => "solve",
            Command::DemoIntegral(_) => "demo-integral",
            Command::Gallery(_) => "gallery",
        }
    }
}

/// Malformed input detected after argument parsing; exits with [`EXIT_USAGE`].
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    if e.is::<UsageError>() {
        return EXIT_USAGE;
    }
    match e.downcast_ref::<quasifix_core::Error>() {
        Some(quasifix_core::Error::InvalidConfig(_)) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match commands::dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code_for(&e)
        }
    }
}
