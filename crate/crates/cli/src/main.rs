//! `rpzf` command-line front end.
//!
//! Exit codes: 0 success, 2 parse / usage errors, 3 domain errors,
//! 4 size limits, 5 numerical failures.

mod commands;
mod grid;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rpzf::ErrorKind;

use commands::{
    AnalyzeArgs, CriticalArgs, MeanfieldArgs, PmfArgs, SimulateArgs, ThresholdArgs,
};

#[derive(Debug, Parser)]
#[command(name = "rpzf", version, about = "Reversion probabilistic zero forcing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Analyze(AnalyzeArgs),
    CriticalP(CriticalArgs),
    Simulate(SimulateArgs),
    Threshold(ThresholdArgs),
    Meanfield(MeanfieldArgs),
    Pmf(PmfArgs),
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Parse => 2,
        ErrorKind::Domain => 3,
        ErrorKind::Size => 4,
        ErrorKind::Numerical => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze_cmd(a),
        Command::CriticalP(a) => commands::critical_cmd(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Threshold(a) => commands::threshold_cmd(a),
        Command::Meanfield(a) => commands::meanfield_cmd(a),
        Command::Pmf(a) => commands::pmf_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        super::Cli::command().debug_assert();
    }
}
