use std::process::ExitCode;

fn main() -> ExitCode {
    match pauli_prop_cli::run_from_args(std::env::args()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
