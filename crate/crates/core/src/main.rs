use std::process::ExitCode;

fn main() -> ExitCode {
    grn_pole::cli::main_with_args(std::env::args_os().collect())
}
