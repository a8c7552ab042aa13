use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lancaster::cli::main_entry() as u8)
}
