use std::fs;
use std::process::ExitCode;

use clap::Parser;
use paperfold_cli::commands::{Artifact, EXIT_ERROR};
use paperfold_cli::{execute, Cli};

fn run(cli: &Cli) -> Result<i32, String> {
    if let Some(n) = cli.opts.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| format!("--workers: {e}"))?;
    }
    let outcome = execute(cli)?;
    let text = outcome.render(cli.opts.format)?;
    match (&cli.opts.out, &outcome.artifact) {
        (Some(path), _) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, _) => print!("{text}"),
    }
    if let (Some(path), Artifact::Report(_)) = (&cli.opts.out, &outcome.artifact) {
        eprintln!("report written to {}", path.display());
    }
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
