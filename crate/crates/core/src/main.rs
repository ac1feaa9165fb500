use std::process::ExitCode;

fn main() -> ExitCode {
    gls::cli::run_from(std::env::args())
}
