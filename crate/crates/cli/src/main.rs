use std::process::ExitCode;

use bdt_cli::app::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if let Some(msg) = failure.message() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
