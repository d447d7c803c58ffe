//! `qimf` command-line tool.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage errors.

mod bench;
mod common;
mod generate;
mod prep;
mod solve;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "qimf",
    version,
    about = "Mean-field QUBO solvers with shot-subsampled costs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a problem instance.
    #[command(subcommand)]
    Generate(generate::GenerateCommand),
    /// Run one solver on an instance.
    Solve(solve::SolveArgs),
    /// Run several solvers and seeds at a shared query budget.
    Bench(bench::BenchArgs),
    /// Build a portfolio instance from price and sector CSV files.
    Ingest(prep::IngestArgs),
    /// Fix diagonally dominant variables and write the reduced instance.
    Preprocess(prep::PreprocessArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(cmd) => generate::run(cmd),
        Command::Solve(args) => solve::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Ingest(args) => prep::ingest(args),
        Command::Preprocess(args) => prep::preprocess(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
