use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

mod commands;
mod problem;

use commands::{Command, Failure, Settings, DEFAULT_BUDGET, DEFAULT_SAMPLES};
use problem::Problem;

/// Pfaff classification, Legendrian search and convex Darboux representations
/// of polynomial 1-forms, with exact certificates.
#[derive(Debug, Parser)]
#[command(name = "darboux", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    /// Compact JSON (default).
    #[arg(long, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON plus a one-line summary on stderr.
    #[arg(long)]
    pretty: bool,
}

fn emit(value: &Value, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    };
    println!("{}", text.expect("JSON value serializes"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let problem = match Problem::load(&cli.input) {
        Ok(p) => p,
        Err(e) => {
            emit(&e.to_json(), cli.pretty);
            return ExitCode::from(2);
        }
    };
    let settings = Settings {
        seed: cli.seed.or(problem.file.seed).unwrap_or(0),
        samples: cli
            .samples
            .or(problem.file.samples)
            .unwrap_or(DEFAULT_SAMPLES),
        budget: cli.budget.or(problem.file.budget).unwrap_or(DEFAULT_BUDGET),
    };
    let (value, code, summary) = match commands::run(cli.command, &problem, &settings) {
        Ok(out) => {
            let code = if out.success { 0 } else { 1 };
            (out.report, code, if out.success { "ok" } else { "failed" })
        }
        Err(Failure::Math(v)) => (v, 1, "mathematical failure"),
        Err(Failure::Input(e)) => (e.to_json(), 2, "input error"),
    };
    emit(&value, cli.pretty);
    if cli.pretty {
        eprintln!("{:?}: {summary}", cli.command);
    }
    ExitCode::from(code)
}
