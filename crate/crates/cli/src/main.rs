use std::process::ExitCode;

use clap::Parser;
use hadperm_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("hadperm: {e}");
            ExitCode::from(2)
        }
    }
}
