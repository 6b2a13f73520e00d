use std::process;

use clap::Parser;

use nntk_cli::config::{Cli, ExperimentConfig};
use nntk_cli::experiments::{run_experiment, RunError};

/// Exit codes: 0 success, 2 input error, 3 guard abort, 1 anything else.
fn main() {
    let cli = Cli::parse();
    let config = match ExperimentConfig::resolve(cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            process::exit(2);
        }
    };
    match run_experiment(&config) {
        Ok(()) => {}
        Err(RunError::Lib(e)) => {
            let code = match &e {
                nntk::Error::GuardFailedAtStep { .. } | nntk::Error::NotPositiveDefinite { .. } => 3,
                nntk::Error::Input(_) => 2,
                _ => 1,
            };
            eprintln!("error: {e}");
            process::exit(code);
        }
        Err(RunError::Io(e)) => {
            eprintln!("error: {e}");
            process::exit(1);
        }
    }
}
