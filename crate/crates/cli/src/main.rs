use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(tensordiag_cli::run(std::env::args_os()))
}
