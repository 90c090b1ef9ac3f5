use std::process::ExitCode;

fn main() -> ExitCode {
    vicar_cli::run(std::env::args_os())
}
