use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    // Clap exits with 2 on usage errors; 2 means "infeasible" here.
    let cli = match adjsurf_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { adjsurf_cli::EXIT_INPUT as u8 } else { 0 });
        }
    };
    match adjsurf_cli::run(cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.text.as_bytes());
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            let _ = std::io::stdout().write_all(e.report().as_bytes());
            eprintln!("adjsurf: {e}");
            ExitCode::from(adjsurf_cli::EXIT_INPUT as u8)
        }
    }
}
