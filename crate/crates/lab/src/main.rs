use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use eqdist_lab::commands::COMMANDS;
use eqdist_lab::run::{execute, Invocation};

/// Dynamics and equidistribution experiments over finite fields.
#[derive(Parser)]
#[command(name = "eqdist-lab", version)]
struct Cli {
    /// One of the experiment commands, or `suite`.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
    command: String,
    /// JSON experiment config (optional for `suite`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for sampled inputs; overrides `params.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let inv = Invocation { command: cli.command, config: cli.config, seed: cli.seed, out: cli.out };
    let result = execute(&inv);
    for line in &result.stdout {
        println!("{line}");
    }
    if let Some(e) = &result.error {
        eprintln!("eqdist-lab: {e}");
    }
    ExitCode::from(result.exit_code as u8)
}
