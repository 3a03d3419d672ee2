//! `eprmap` command-line tool.
//!
//! Each subcommand writes one JSON document to standard output (or `--out`)
//! and a short summary to standard error. Exit status: 0 on success, 2 for
//! unreadable or invalid input, 3 when a residual exceeds its tolerance.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{CliError, Outcome};

fn summary(outcome: &Outcome) -> String {
    let mut s = String::new();
    if outcome.checks.is_empty() {
        s.push_str(&format!("{}: done\n", outcome.command));
        return s;
    }
    let width = outcome.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &outcome.checks {
        let mark = if c.passed() { "ok  " } else { "FAIL" };
        s.push_str(&format!(
            "{mark} {:<width$}  {:>10.3e}  (tol {:.0e})\n",
            c.name, c.residual, c.tolerance
        ));
    }
    let failed = outcome.failures().len();
    if failed == 0 {
        s.push_str(&format!("{}: {} residuals within tolerance\n", outcome.command, outcome.checks.len()));
    } else {
        s.push_str(&format!("{}: {failed} of {} residuals out of tolerance\n", outcome.command, outcome.checks.len()));
    }
    s
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&outcome.report()).expect("JSON values serialize") + "\n";
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write report: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli).and_then(|outcome| {
        emit(&cli, &outcome)?;
        eprint!("{}", summary(&outcome));
        let failed: Vec<&str> = outcome.failures().iter().map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Numerical(format!("tolerance exceeded: {}", failed.join(", "))))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
