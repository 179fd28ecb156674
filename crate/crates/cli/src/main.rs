mod commands;
mod config;

use clap::Parser;
use config::{Cli, CliError, RunConfig};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = cli.command;
    let result = RunConfig::from_opts(cli.opts).and_then(|cfg| {
        let out = commands::run(cmd, &cfg)?;
        commands::emit(cmd, &out, cfg.out.as_deref())?;
        if out.pass {
            Ok(())
        } else {
            Err(CliError::Failed)
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed) => {
            eprintln!("darboux-lab: verification failed");
            ExitCode::from(3)
        }
        Err(CliError::Config { invariant, message }) => {
            eprintln!("darboux-lab: {invariant}: {message}");
            ExitCode::from(2)
        }
    }
}
