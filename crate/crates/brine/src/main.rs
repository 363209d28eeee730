use std::process::ExitCode;

use brine::{exit, init_threads, run, Cli, CliError};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(err) => report(&err),
    }
}

fn report(err: &CliError) -> ExitCode {
    let code = err.exit_code();
    let payload = serde_json::to_string_pretty(&err.payload()).unwrap_or_default();
    if code == exit::NON_UNIQUE || code == exit::INFEASIBLE {
        println!("{payload}");
    }
    eprintln!("error: {err}");
    ExitCode::from(code)
}
