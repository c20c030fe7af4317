mod args;
mod commands;
mod config;
mod report;

use clap::Parser;

fn main() -> anyhow::Result<()> {
    let cli = args::Cli::parse();
    match cli.command {
        args::Command::Enhance(a) => commands::enhance(a),
        args::Command::Decompose(a) => commands::decompose(a),
        args::Command::Bench(a) => commands::bench(a),
        args::Command::Metrics(a) => commands::metrics(a),
    }
}
