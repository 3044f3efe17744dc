use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use folia::app::{configure_threads, execute, Cli, EXIT_ANALYSIS};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_ANALYSIS as u8);
    }
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(f) => {
            print!("{}", f.stdout);
            let _ = std::io::stdout().flush();
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code as u8)
        }
    }
}
