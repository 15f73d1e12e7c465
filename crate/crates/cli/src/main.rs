use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lexiboot_cli::run(std::env::args().collect()))
}
