//! The `opi` binary.

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(opi_cli::run(std::env::args_os(), &mut std::io::stdout().lock()))
}
