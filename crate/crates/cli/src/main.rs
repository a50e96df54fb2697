mod commands;
mod config;

use std::fmt;
use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

/// A request the tool refuses: bad input, domain error or cap. Exit code 2.
#[derive(Debug)]
pub struct UserError(pub String);

impl fmt::Display for UserError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<tableau_corners::Error> for UserError {
    fn from(e: tableau_corners::Error) -> Self {
        UserError(e.to_string())
    }
}

const EXIT_INTERNAL: u8 = 1;
const EXIT_USER: u8 = 2;

fn execute(cfg: &RunConfig) -> Result<bool, UserError> {
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| UserError(format!("cannot size thread pool: {e}")))?;
    }
    let out = commands::run(cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &out.text)
            .map_err(|e| UserError(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a panic
            let _ = stdout.write_all(out.text.as_bytes());
        }
    }
    Ok(out.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USER);
        }
    };
    ExitCode::from(exit_code(panic::catch_unwind(|| execute(&cfg))))
}

fn exit_code(outcome: std::thread::Result<Result<bool, UserError>>) -> u8 {
    match outcome {
        Ok(Ok(true)) => 0,
        Ok(Ok(false)) => {
            eprintln!("error: some checks failed");
            EXIT_INTERNAL
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            EXIT_USER
        }
        Err(_) => EXIT_INTERNAL,
    }
}
