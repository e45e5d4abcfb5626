use std::process::ExitCode;

fn main() -> ExitCode {
    lm_core::cli::main()
}
