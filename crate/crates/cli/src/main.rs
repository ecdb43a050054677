//! Command-line front end: data generation, training, prediction,
//! evaluation, and the embedding-dimension ablation.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod model;
mod profiles;
mod series_io;

use commands::{AblateArgs, EvaluateArgs, GenDataArgs, PredictArgs, TrainArgs};

#[derive(Parser)]
#[command(
    name = "delay-esn",
    version,
    about = "Train echo-state networks on delay-embedded scalar series and free-run them as forecasters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a ground-truth series CSV from a built-in system.
    GenData(GenDataArgs),
    /// Train a network on a series CSV and write a model file.
    Train(TrainArgs),
    /// Free-run a trained model; optionally score it against truth.
    Predict(PredictArgs),
    /// Compute NRMSE / Pearson / NMAE between two series files.
    Evaluate(EvaluateArgs),
    /// Monte-Carlo ablation over the embedding dimension.
    Ablate(AblateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenData(args) => commands::cmd_gen_data(args),
        Command::Train(args) => commands::cmd_train(args),
        Command::Predict(args) => commands::cmd_predict(args),
        Command::Evaluate(args) => commands::cmd_evaluate(args),
        Command::Ablate(args) => commands::cmd_ablate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
