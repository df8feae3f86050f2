mod args;
mod commands;
mod config;
mod error;
mod init;
mod output;
mod validate;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Evolve(a) => &a.common,
        Command::Lg(a) | Command::Coherence(a) => &a.common,
        Command::Validate(a) => &a.common,
    };
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Evolve(a) => commands::evolve(a),
        Command::Lg(a) => commands::lg(a),
        Command::Coherence(a) => commands::coherence(a),
        Command::Validate(a) => validate::validate(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bixon: {e}");
            e.exit_code()
        }
    }
}
