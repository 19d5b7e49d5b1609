use std::process::ExitCode;

use clap::Parser;

use weave::cli::Cli;
use weave::commands::run;
use weave::EXIT_INPUT;

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, matching the input exit code
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            for l in &report.lines {
                println!("{l}");
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if report.failed {
                ExitCode::from(EXIT_INPUT as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
