use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use social_cache::cli::{cmd_figures, cmd_run, cmd_verify, CliError, ExitStatus};
use social_cache::verify::{Fault, VerifyOptions};

#[derive(Parser)]
#[command(name = "social-cache", version, about = "Matching-based proactive caching simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the storage-ratio / request-count sweep and write a results CSV.
    Run {
        /// Scenario JSON; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Run a single seed instead of the configured list.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check stability and trace properties on random matching instances.
    Verify {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Upper bound on agents per side.
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long, default_value_t = 3)]
        max_quota: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Aggregate a results CSV into plot-ready satisfaction and download-time tables.
    Figures {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ExitStatus::ValidationFailure as u8 } else { 0 });
        }
    };
    let mut stdout = std::io::stdout().lock();
    let result: Result<(), CliError> = match cli.command {
        Command::Run { config, out, seed } => cmd_run(config.as_deref(), &out, seed, &mut stdout),
        Command::Verify { trials, seed, max_size, max_quota, inject_fault } => {
            let options = VerifyOptions {
                trials,
                seed,
                max_size,
                max_quota,
                fault: inject_fault.then_some(Fault::ReversedReceivers),
            };
            cmd_verify(&options, &mut stdout).map(drop)
        }
        Command::Figures { csv, out } => cmd_figures(&csv, &out, &mut stdout).map(drop),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_status() as u8)
        }
    }
}
