use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ltll_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match ltll_cli::run(cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            ExitCode::from(outcome.status.code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
