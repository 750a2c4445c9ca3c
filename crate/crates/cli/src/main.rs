use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use ghk::{Cli, Failure, PROFILE_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let profile = std::env::var(PROFILE_ENV).ok();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = ghk::run(&cli, profile.as_deref(), &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(e), _) => {
            match &e {
                Failure::Invalid(err) => eprintln!("error: {err:#}"),
                Failure::Io(err) => eprintln!("error: {err}"),
                Failure::Breach => eprintln!("verification failed: tolerance breach"),
            }
            ExitCode::from(e.exit_code())
        }
        (Ok(()), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
