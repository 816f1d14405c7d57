use std::process::ExitCode;

use clap::Parser;
use wsl::{run, Cli, CliError};

fn main() -> ExitCode {
    let raw: Vec<_> = std::env::args_os().collect();
    // Clap reports usage errors with status 2, which is reserved for verdicts.
    let cli = match Cli::try_parse_from(&raw) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli, &raw) {
        Ok(outcome) => {
            if !outcome.summary.is_empty() {
                println!("{}", outcome.summary);
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("wsl: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("run `wsl --help` for usage");
            }
            ExitCode::from(1)
        }
    }
}
