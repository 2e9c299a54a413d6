use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(pareto_cli::run(std::env::args_os()))
}
