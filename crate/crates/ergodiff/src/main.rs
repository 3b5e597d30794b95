use std::process::ExitCode;

fn main() -> ExitCode {
    ergodiff::cli::main()
}
