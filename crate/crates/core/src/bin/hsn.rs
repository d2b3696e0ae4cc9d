use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(halfspace_neumann::cli::run(std::env::args_os()) as u8)
}
