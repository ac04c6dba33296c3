//! `weat`: embedding file -> association-test result JSON.

use std::path::PathBuf;
use std::time::Instant;

use corpusbias::weat::randomization_test;

use super::{
    file_stem, finish_manifest, load_embeddings, load_word_sets, sidecar_manifest_path,
    write_json, Ctx,
};
use crate::opts::{resolve_seed, WeatOpts};
use crate::{invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Embedding file (binary or text).
    #[arg(long)]
    embeddings: PathBuf,
    /// Directory with names_black.txt, names_white.txt, pleasant.txt,
    /// unpleasant.txt; the shipped sets are used when omitted.
    #[arg(long)]
    sets: Option<PathBuf>,
    /// Result JSON path.
    #[arg(long)]
    out: PathBuf,
    /// Corpus label recorded in the result; defaults to the embedding file
    /// stem.
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    weat: WeatOpts,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, &ctx.config).map_err(invalid)?;
    let cfg = args.weat.resolve(&ctx.config, seed).map_err(invalid)?;
    cfg.validate().map_err(invalid)?;
    let sets = load_word_sets(args.sets.as_deref())?;
    let embeddings = load_embeddings(&args.embeddings)?;

    let mut manifest = ctx.manifest("weat");
    manifest.seed = Some(seed);
    manifest.set_config("embeddings", args.embeddings.display());
    manifest.set_config("shuffles", cfg.shuffles);
    manifest.set_config("alpha", cfg.alpha);
    manifest.set_config("statistic", cfg.statistic);
    manifest.set_config(
        "sets",
        args.sets
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "builtin".into()),
    );

    let started = Instant::now();
    let mut result = randomization_test(&sets, &embeddings, &cfg).map_err(invalid)?;
    manifest.record_timing("randomization-test", started.elapsed());

    result.corpus = args
        .corpus
        .clone()
        .unwrap_or_else(|| file_stem(&args.embeddings));
    let manifest_path = sidecar_manifest_path(&args.out);
    result.manifest = manifest_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned());

    write_json(&args.out, &result)?;
    let mut inputs = vec![args.embeddings.as_path()];
    if let Some(dir) = &args.sets {
        inputs.push(dir.as_path());
    }
    finish_manifest(manifest, &inputs, &[args.out.as_path()], &manifest_path)?;

    println!(
        "{}: observed {:.6}, normalized {}, p = {:.6} ({}) over {} shuffles; resolved X {} Y {} A {} B {}",
        result.corpus,
        result.observed,
        result
            .normalized
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "undefined".into()),
        result.p_value,
        if result.significant { "significant" } else { "not significant" },
        result.shuffles,
        result.resolved.x,
        result.resolved.y,
        result.resolved.a,
        result.resolved.b,
    );
    Ok(())
}
