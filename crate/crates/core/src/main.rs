use std::process::ExitCode;

fn main() -> ExitCode {
    ewl_core::cli::main()
}
