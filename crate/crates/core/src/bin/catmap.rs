use std::process::ExitCode;

fn main() -> ExitCode {
    catmap::cli::main_with_args(std::env::args_os())
}
