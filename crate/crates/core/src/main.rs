use std::process::ExitCode;

fn main() -> ExitCode {
    bornolab::cli::main(std::env::args_os())
}
