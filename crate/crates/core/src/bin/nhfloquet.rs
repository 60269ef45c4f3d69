use std::process::ExitCode;

use nhfloquet::cli;

fn main() -> ExitCode {
    let config = match cli::parse_config(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("nhfloquet: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match cli::run(&config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nhfloquet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
