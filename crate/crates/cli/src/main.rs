use std::process::ExitCode;

use clap::Parser;
use mvmap_cli::{execute, Cli, EXIT_INVALID};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID as u8 } else { 0 });
        }
    };
    let code = match execute(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    };
    ExitCode::from(code as u8)
}
