use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use horoflow_cli::{execute, thread_cap, CliError, CommandKind};

/// Translating solitons and horosphere stability experiments in hyperbolic space.
#[derive(Parser)]
#[command(name = "horoflow", version)]
struct Args {
    /// What to run; must match the config's `command` key if it has one.
    #[arg(value_enum)]
    command: CommandKind,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the config's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Do not list written files on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = std::env::var("HOROFLOW_THREADS")
        .ok()
        .as_deref()
        .map_or_else(|| thread_cap(None), |v| thread_cap(Some(v)))
        .and_then(|threads| execute(args.command, &args.config, args.out.as_deref(), threads));
    match result {
        Ok(paths) => {
            if !args.quiet {
                for p in paths {
                    println!("{}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code())
}
