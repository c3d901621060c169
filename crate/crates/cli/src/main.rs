//! `tsp`: generate knowledge bases, select ELM models by swarm
//! optimization, evaluate, compare optimizers and predict.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "tsp", version, about = "Transient stability prediction with swarm-optimized ELMs")]
struct Cli {
    /// Run configuration (TOML); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = ["ipso", "pso", "ga"])]
    optimizer: Option<String>,
    /// Runs per optimizer for `compare`.
    #[arg(long, global = true)]
    repeats: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario grid and write the knowledge base.
    Generate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Knowledge-base CSV to write (default: <out>/kb.csv).
        #[arg(long)]
        kb: Option<PathBuf>,
    },
    /// Select an ELM by swarm optimization and save it.
    Optimize {
        #[arg(long)]
        kb: Option<PathBuf>,
    },
    /// Score the held-out rows with a saved model.
    Evaluate {
        #[arg(long)]
        kb: Option<PathBuf>,
        #[arg(long)]
        model_file: Option<PathBuf>,
    },
    /// Repeated runs of every optimizer on one knowledge base.
    Compare {
        #[arg(long)]
        kb: Option<PathBuf>,
    },
    /// Label raw feature vectors with a saved model.
    Predict {
        #[arg(long)]
        model_file: Option<PathBuf>,
        /// One comma-separated feature vector.
        #[arg(long, conflicts_with = "input")]
        row: Option<String>,
        /// CSV of feature vectors; a leading `label` column is ignored.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let mut overrides = Overrides {
        out: cli.out,
        optimizer: cli.optimizer,
        seed: cli.seed,
        repeats: cli.repeats,
        ..Overrides::default()
    };
    match &cli.command {
        Command::Generate { model, grid, kb } => {
            overrides.model = model.clone();
            overrides.grid = grid.clone();
            overrides.kb = kb.clone();
        }
        Command::Optimize { kb } | Command::Compare { kb } => overrides.kb = kb.clone(),
        Command::Evaluate { kb, model_file } => {
            overrides.kb = kb.clone();
            overrides.model_file = model_file.clone();
        }
        Command::Predict { model_file, .. } => overrides.model_file = model_file.clone(),
    }
    let cfg = match RunConfig::load(cli.config.as_deref(), overrides) {
        Ok(cfg) => cfg,
        Err(e) => return commands::report(commands::Failure::Usage(e)),
    };

    let result = match &cli.command {
        Command::Generate { .. } => commands::generate(&cfg),
        Command::Optimize { .. } => commands::optimize(&cfg),
        Command::Evaluate { .. } => commands::evaluate(&cfg),
        Command::Compare { .. } => commands::compare(&cfg),
        Command::Predict { row, input, .. } => commands::predict(&cfg, row.as_deref(), input.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => commands::report(f),
    }
}
