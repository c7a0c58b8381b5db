//! `opi`: command-line front end for the opi-core workbench.
//!
//! Every command prints a JSON document (to stdout or `--out`). Exit codes:
//! 0 on success, 1 when a verification fails, 2 on usage errors. The binary
//! is a thin shell over [`run`], which other crates can call in-process.

mod commands;
mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opi_core::Error;

/// Exit code of a failed verification.
pub const EXIT_VERIFY: u8 = 1;
/// Exit code of a usage error.
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "opi", version, about = "Classical workbench for DQI on optimal polynomial intersection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed of every random choice; falls back to OPI_SEED, then a fixed default.
    #[arg(long, env = "OPI_SEED")]
    pub seed: Option<u64>,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit compact single-line JSON.
    #[arg(long)]
    pub compact: bool,
    /// TOML file overriding field constants (keys: b, irreducible_hex, costs).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Common {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(opi_core::rng::DEFAULT_SEED)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical hardness estimates and decoder ledgers for an instance.
    Estimate(commands::EstimateArgs),
    /// Reed-Solomon decoding.
    Rs {
        #[command(subcommand)]
        command: RsCommand,
    },
    /// Extended Euclidean machines.
    Eea {
        #[command(subcommand)]
        command: EeaCommand,
    },
    /// Combination ranking for Dicke-state preparation.
    Dicke {
        #[command(subcommand)]
        command: DickeCommand,
    },
    /// Maiorana-McFarland target sets.
    Bent {
        #[command(subcommand)]
        command: BentCommand,
    },
    /// Desk-scale invariant suite with a pass/fail matrix per module.
    Selftest(selftest::SelftestArgs),
}

#[derive(Subcommand, Debug)]
enum RsCommand {
    /// Plant random error patterns and decode them in both modes.
    Decode(commands::DecodeArgs),
}

#[derive(Subcommand, Debug)]
enum EeaCommand {
    /// Cycle trace of the synchronized machine and buffer trace of the Dialog build.
    Trace(commands::TraceArgs),
}

#[derive(Subcommand, Debug)]
enum DickeCommand {
    /// Unrank a combination with both algorithms.
    Unrank(commands::UnrankArgs),
    /// Exhaustive round-trip sweep.
    Selftest(commands::DickeSweepArgs),
}

#[derive(Subcommand, Debug)]
enum BentCommand {
    /// Exhaustive affine-intersection maxima against the bound table.
    Verify(commands::BentVerifyArgs),
    /// Generate a twisted bent target instance.
    Gen(commands::BentGenArgs),
}

/// XP comparator choice on the command line.
#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum XpChoice {
    Fast,
    Slow,
    Off,
}

/// Result of a command: the JSON document and whether its checks passed.
pub struct Outcome {
    pub json: serde_json::Value,
    pub passed: bool,
}

/// Parses `args` (program name first), runs the command, writes the JSON
/// document to `stdout` unless `--out` is given, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (result, common) = match &cli.command {
        Command::Estimate(a) => (commands::estimate(a), &a.common),
        Command::Rs { command: RsCommand::Decode(a) } => (commands::decode(a), &a.common),
        Command::Eea { command: EeaCommand::Trace(a) } => (commands::trace(a), &a.common),
        Command::Dicke { command: DickeCommand::Unrank(a) } => (commands::unrank(a), &a.common),
        Command::Dicke { command: DickeCommand::Selftest(a) } => (commands::dicke_sweep(a), &a.common),
        Command::Bent { command: BentCommand::Verify(a) } => (commands::bent_verify(a), &a.common),
        Command::Bent { command: BentCommand::Gen(a) } => (commands::bent_gen(a), &a.common),
        Command::Selftest(a) => (selftest::run(a), &a.common),
    };
    match result {
        Ok(outcome) => match commands::emit(&outcome.json, common, stdout) {
            Ok(()) if outcome.passed => 0,
            Ok(()) => EXIT_VERIFY,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_VERIFY
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_of(&e)
        }
    }
}

/// Bad parameters are usage errors; anything else is a failed computation.
fn exit_code_of(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::InvalidField(_) | Error::ElementOutOfRange { .. } | Error::Capability(_) => {
            EXIT_USAGE
        }
        _ => EXIT_VERIFY,
    }
}
