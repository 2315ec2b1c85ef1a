use std::process::ExitCode;

fn main() -> ExitCode {
    specfact::cli::main()
}
