use std::process::ExitCode;

use clap::Parser;
use mfpass::cli::{run, Cli};

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                // usage errors are configuration errors
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
