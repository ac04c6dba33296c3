//! `train`: shard file -> embedding file.

use std::path::PathBuf;
use std::time::Instant;

use corpusbias::corpus::CorpusShard;
use corpusbias::embedding::{
    build_vocab, count_cooccurrences, save_binary, save_text, train, EmbeddingError,
};

use super::{finish_manifest, sidecar_manifest_path, Ctx};
use crate::opts::{resolve_seed, TrainOpts};
use crate::{internal, invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Preprocessed shard file (one document of space-separated tokens per
    /// line).
    #[arg(long)]
    shard: PathBuf,
    /// Output embedding file (binary format).
    #[arg(long)]
    out: PathBuf,
    /// Also write the text format here.
    #[arg(long = "text-out")]
    text_out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    train: TrainOpts,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, &ctx.config).map_err(invalid)?;
    let cfg = args
        .train
        .resolve(&ctx.config, seed, ctx.threads)
        .map_err(invalid)?;
    cfg.validate().map_err(invalid)?;

    let mut manifest = ctx.manifest("train");
    manifest.seed = Some(seed);
    manifest.set_config("shard", args.shard.display());
    manifest.set_config("dim", cfg.dimension);
    manifest.set_config("window", cfg.window);
    manifest.set_config("min-count", cfg.min_count);
    manifest.set_config("iters", cfg.iterations);
    manifest.set_config("x-max", cfg.x_max);
    manifest.set_config("exponent", cfg.exponent);
    manifest.set_config("learning-rate", cfg.learning_rate);
    manifest.set_config("threads", ctx.threads);

    let shard = CorpusShard::load(&args.shard).map_err(invalid)?;

    let started = Instant::now();
    let vocab = build_vocab(&shard, cfg.min_count);
    if vocab.is_empty() {
        return Err(invalid(EmbeddingError::EmptyVocabulary));
    }
    manifest.record_timing("vocab", started.elapsed());

    let started = Instant::now();
    let table = count_cooccurrences(&shard, &vocab, cfg.window).map_err(invalid)?;
    manifest.record_timing("cooccur", started.elapsed());

    let started = Instant::now();
    let set = train(&table, &vocab, &cfg).map_err(internal)?;
    manifest.record_timing("train", started.elapsed());

    save_binary(&set, &args.out).map_err(internal)?;
    let mut outputs = vec![args.out.clone()];
    if let Some(text_path) = &args.text_out {
        save_text(&set, text_path).map_err(internal)?;
        outputs.push(text_path.clone());
    }
    let output_refs: Vec<&std::path::Path> = outputs.iter().map(PathBuf::as_path).collect();
    finish_manifest(
        manifest,
        &[args.shard.as_path()],
        &output_refs,
        &sidecar_manifest_path(&args.out),
    )?;

    let meta = set.meta.as_ref().expect("trained sets carry metadata");
    println!(
        "trained {} terms x {} dims over {} co-occurrence cells in {} iterations; final loss {:.6}",
        set.len(),
        set.dim(),
        table.nonzero_len(),
        meta.iterations,
        meta.final_loss,
    );
    Ok(())
}
