use std::process::ExitCode;

use clap::Parser;
use lpn_cli::args::Cli;

fn main() -> ExitCode {
    lpn_cli::run(&Cli::parse())
}
