//! Command-line front end for `kcompound`.
//!
//! Every subcommand prints one JSON report on stdout. Exit status: 0 ok or
//! pass, 1 a certificate or identity check failed, 2 unreadable input or bad
//! usage, 3 a domain error, 4 an output file could not be written.

pub mod cli;
pub mod commands;
pub mod error;
pub mod input;
pub mod report;

use std::io::Write;
use std::time::Instant;

pub use cli::{Cli, Command};
pub use error::{exit, CliError, CliResult};
pub use report::{Report, Status};

/// Runs one command, writing the report to `out` and diagnostics to stderr.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut impl Write) -> u8 {
    let start = Instant::now();
    let result = match &cli.command {
        Command::Compound(a) => commands::compound(a),
        Command::Lognorm(a) => commands::lognorm(a),
        Command::Tau(a) => commands::tau_cmd(a),
        Command::Certify(a) => commands::certify_cmd(a),
        Command::DualityCheck(a) => commands::duality_check(a),
        Command::Simulate(a) => commands::simulate(a),
    };
    match result {
        Ok(mut rep) => {
            if cli.timing {
                rep.timing = Some(start.elapsed().as_secs_f64());
            }
            if let Err(e) = out.write_all(rep.render().as_bytes()).and_then(|()| out.flush()) {
                eprintln!("kcompound: cannot write report: {e}");
                return exit::OUTPUT;
            }
            match rep.status {
                Status::Fail => exit::FAILED,
                Status::Ok | Status::Pass => exit::OK,
            }
        }
        Err(e) => {
            eprintln!("kcompound: {e}");
            e.exit_code()
        }
    }
}
