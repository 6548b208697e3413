use std::process::ExitCode;

use adcsim::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match adcsim::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adcsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
