//! Experiment runner: generate pen-world logs, learn a bank of predictions
//! online, solve for the offline optimum, and emit evaluation reports.

mod common;
mod learn;
mod report;
mod simulate;
mod solve;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "nexting",
    version,
    about = "Parallel multi-timescale prediction over sensor streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded wall-following sensor log.
    Simulate(simulate::SimulateArgs),
    /// Stream a log through the prediction bank and checkpoint the weights.
    Learn(learn::LearnArgs),
    /// Compute ideal returns and the offline least-squares optimum for probes.
    Solve(solve::SolveArgs),
    /// Emit learning-curve and event-aligned CSV reports.
    Report(report::ReportArgs),
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Simulate(args) => simulate::run(args),
        Command::Learn(args) => learn::run(args),
        Command::Solve(args) => solve::run(args),
        Command::Report(args) => report::run(args),
    }
}
