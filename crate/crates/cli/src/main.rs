use std::process::ExitCode;

fn main() -> ExitCode {
    wcr_cli::run(std::env::args_os())
}
