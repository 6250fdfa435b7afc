use std::io::{self, Write};
use std::process::ExitCode;

use tripod_memory_cli::{run_command, CliError};

fn main() -> ExitCode {
    match run_command(std::env::args_os()) {
        Ok(report) => {
            let mut out = io::stdout().lock();
            for f in &report.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            for n in &report.notes {
                let _ = writeln!(out, "{n}");
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                for f in &report.failures {
                    eprintln!("error: {f}");
                }
                ExitCode::FAILURE
            }
        }
        Err(CliError::Usage(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
