mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Outcome;

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Certify(a) => commands::certify(a),
        Command::Search(a) => commands::search(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Dichotomy(a) => commands::dichotomy(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Upper(a) => commands::upper(a),
        Command::VerifyCert(a) => commands::verify_cert(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Certified) => ExitCode::SUCCESS,
        Ok(Outcome::NotCertified) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
