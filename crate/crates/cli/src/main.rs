use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = gyroprior::cli::Cli::parse();
    match gyroprior::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gyroprior: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
