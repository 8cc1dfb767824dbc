use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(jetwronsk::cli::run(std::env::args_os()))
}
