use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ebzip_cli::run(ebzip_cli::Cli::parse()).into()
}
