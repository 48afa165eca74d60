use std::process::ExitCode;

fn main() -> ExitCode {
    raceway::cli::run(std::env::args_os())
}
