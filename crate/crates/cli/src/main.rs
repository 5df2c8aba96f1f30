use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use subtraj_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits with 2 on usage errors and 0 for --help / --version.
        Err(e) => e.exit(),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let outcome = run(&cli, &mut out);
    let _ = out.flush();
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("subtraj: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
