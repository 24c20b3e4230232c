use std::process::ExitCode;

use centrolab_cli::config::Command;
use centrolab_cli::{execute, exit_code, Cli, EXIT_CONFIG};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let result = cli.run_config().and_then(|cfg| execute(&cfg));
    match result {
        Ok(out) => {
            println!("{}", out.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("centrolab {}: {e}", Command::from(cli.command));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
