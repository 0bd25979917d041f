use std::process::ExitCode;

use clap::Parser;
use linfb_cli::{configure_threads, run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("LINFB_THREADS").ok();
    let result = configure_threads(threads.as_deref()).and_then(|()| run(cli));
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
