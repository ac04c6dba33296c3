//! `corpusbias`: train embeddings on sharded corpora and measure
//! word-association bias with randomization tests.
//!
//! Exit status: 0 on success, 1 on invalid input (including usage errors),
//! 2 on internal failure.

mod commands;
mod config;
mod opts;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::commands::Ctx;
use crate::config::FileConfig;

#[derive(Parser)]
#[command(
    name = "corpusbias",
    version,
    about = "Corpus bias measurement: GloVe-style embeddings, association tests, cross-corpus comparison"
)]
struct Cli {
    /// Flat `key = value` config file consulted for flags not given on the
    /// command line (flags > config file > defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads. 1 (the default) keeps every stage fully
    /// deterministic; with more threads, training becomes seed-approximate
    /// while all other stages stay exact.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest raw JSONL documents into preprocessed region/period shards.
    Ingest(commands::ingest::Args),
    /// Train embeddings on one shard file.
    Train(commands::train::Args),
    /// Run the association randomization test on an embedding file.
    Weat(commands::weat::Args),
    /// Build the synthetic-corpus reference distribution.
    MakeReference(commands::reference::Args),
    /// Judge observed cross-corpus differences against a reference report.
    Compare(commands::compare::Args),
    /// Generate a synthetic corpus with planted association bias.
    Synth(commands::synth::Args),
    /// Run the full pipeline over a list of synthetic-corpus specs.
    Sweep(commands::sweep::Args),
    /// Descriptive statistics and top-terms tables for a shard directory.
    Stats(commands::stats::Args),
    /// Assemble the report bundle from result files.
    Report(commands::report::Args),
}

/// Errors carrying their intended exit status.
pub enum CliError {
    /// Bad user input: missing/unreadable/unparseable inputs, failed
    /// validation. Exit 1.
    Invalid(anyhow::Error),
    /// Failure while computing or writing. Exit 2.
    Internal(anyhow::Error),
}

pub fn invalid<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Invalid(e.into())
}

pub fn internal<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Internal(e.into())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file_config = FileConfig::load(cli.config.as_deref()).map_err(CliError::Invalid)?;
    let threads = match cli.threads {
        Some(t) => t,
        None => file_config
            .get::<usize>("threads")
            .map_err(CliError::Invalid)?
            .unwrap_or(1),
    };
    if threads == 0 {
        return Err(CliError::Invalid(anyhow::anyhow!("--threads must be >= 1")));
    }
    // the global rayon pool serves every parallel stage
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .ok();
    let ctx = Ctx {
        config: file_config,
        threads,
        version: env!("CARGO_PKG_VERSION"),
    };
    match cli.command {
        Command::Ingest(args) => commands::ingest::run(args, &ctx),
        Command::Train(args) => commands::train::run(args, &ctx),
        Command::Weat(args) => commands::weat::run(args, &ctx),
        Command::MakeReference(args) => commands::reference::run(args, &ctx),
        Command::Compare(args) => commands::compare::run(args, &ctx),
        Command::Synth(args) => commands::synth::run(args, &ctx),
        Command::Sweep(args) => commands::sweep::run(args, &ctx),
        Command::Stats(args) => commands::stats::run(args, &ctx),
        Command::Report(args) => commands::report::run(args, &ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}
