//! `redmap`: reduced dynamical maps of joint unitaries on correlated states.

use std::process::ExitCode;

use redmap_cli::run;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run::dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("redmap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
