use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(gleason::cli::run(std::env::args_os()) as u8)
}
