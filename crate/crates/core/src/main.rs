use std::process::ExitCode;

fn main() -> ExitCode {
    ppok::cli::main_with_args(std::env::args_os())
}
