//! `make-reference`: shard directory -> cross-corpus reference report.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use corpusbias::corpus::load_shard_dir;
use corpusbias::crosscorpus::{CrossCorpusReport, SyntheticCorpusSpec};
use corpusbias::pipeline::{make_reference, PipelineError};

use super::{
    finish_manifest, load_word_sets, sidecar_manifest_path, write_json, write_text, Ctx,
};
use crate::opts::{resolve_seed, TrainOpts, WeatOpts};
use crate::{internal, invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of source shard files.
    #[arg(long)]
    shards: PathBuf,
    /// Word-set directory; shipped sets when omitted.
    #[arg(long)]
    sets: Option<PathBuf>,
    /// Number of synthetic reference corpora.
    #[arg(long)]
    k: Option<usize>,
    /// Minimum corpus size in megabytes (may be fractional).
    #[arg(long = "min-mb")]
    min_mb: Option<f64>,
    /// Maximum corpus size in megabytes (may be fractional).
    #[arg(long = "max-mb")]
    max_mb: Option<f64>,
    /// Documents per sampled contiguous segment.
    #[arg(long = "segment-docs")]
    segment_docs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report JSON path.
    #[arg(long)]
    out: PathBuf,
    /// CSV mirror of the per-corpus table; defaults to the report path
    /// with a .csv extension.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    train: TrainOpts,
    #[command(flatten)]
    weat: WeatOpts,
}

/// Per-corpus rows as CSV (index, corpus, statistic, significance).
fn corpora_csv(report: &CrossCorpusReport) -> String {
    let mut out = String::from("index,corpus,normalized_statistic,significant\n");
    for (i, entry) in report.corpora.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{:.4},{}",
            entry.corpus,
            entry.normalized,
            if entry.significant { "yes" } else { "no" }
        );
    }
    out
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, &ctx.config).map_err(invalid)?;
    let defaults = SyntheticCorpusSpec::default();
    let min_mb = ctx
        .config
        .resolve(&args.min_mb, "min-mb", defaults.min_bytes as f64 / 1e6)
        .map_err(invalid)?;
    let max_mb = ctx
        .config
        .resolve(&args.max_mb, "max-mb", defaults.max_bytes as f64 / 1e6)
        .map_err(invalid)?;
    let spec = SyntheticCorpusSpec {
        count: ctx
            .config
            .resolve(&args.k, "k", defaults.count)
            .map_err(invalid)?,
        min_bytes: (min_mb * 1e6).round() as u64,
        max_bytes: (max_mb * 1e6).round() as u64,
        segment_docs: ctx
            .config
            .resolve(&args.segment_docs, "segment-docs", defaults.segment_docs)
            .map_err(invalid)?,
        seed,
    };
    spec.validate().map_err(invalid)?;
    let train_cfg = args
        .train
        .resolve(&ctx.config, seed, ctx.threads)
        .map_err(invalid)?;
    train_cfg.validate().map_err(invalid)?;
    let weat_cfg = args.weat.resolve(&ctx.config, seed).map_err(invalid)?;
    weat_cfg.validate().map_err(invalid)?;
    let sets = load_word_sets(args.sets.as_deref())?;

    let sources = load_shard_dir(&args.shards).map_err(invalid)?;
    if sources.is_empty() {
        return Err(invalid(anyhow::anyhow!(
            "no shard files in {}",
            args.shards.display()
        )));
    }

    let mut manifest = ctx.manifest("make-reference");
    manifest.seed = Some(seed);
    manifest.set_config("k", spec.count);
    manifest.set_config("min-bytes", spec.min_bytes);
    manifest.set_config("max-bytes", spec.max_bytes);
    manifest.set_config("segment-docs", spec.segment_docs);
    manifest.set_config("dim", train_cfg.dimension);
    manifest.set_config("window", train_cfg.window);
    manifest.set_config("min-count", train_cfg.min_count);
    manifest.set_config("iters", train_cfg.iterations);
    manifest.set_config("shuffles", weat_cfg.shuffles);
    manifest.set_config("alpha", weat_cfg.alpha);
    manifest.set_config("threads", ctx.threads);

    let started = Instant::now();
    let mut report = make_reference(&sources, &spec, &sets, &train_cfg, &weat_cfg)
        .map_err(|e| match e {
            PipelineError::CrossCorpus(inner) => invalid(inner),
            other => internal(other),
        })?;
    manifest.record_timing("make-reference", started.elapsed());

    let manifest_path = sidecar_manifest_path(&args.out);
    report.manifest = manifest_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned());
    write_json(&args.out, &report)?;
    let csv_path = args
        .csv
        .clone()
        .unwrap_or_else(|| args.out.with_extension("csv"));
    write_text(&csv_path, &corpora_csv(&report))?;
    finish_manifest(
        manifest,
        &[args.shards.as_path()],
        &[args.out.as_path(), csv_path.as_path()],
        &manifest_path,
    )?;

    println!(
        "{} reference corpora -> {} pairwise differences; threshold at level {}: {:.4}{}",
        report.corpora.len(),
        report.reference.len(),
        report.level,
        report.threshold,
        if report.excluded.is_empty() {
            String::new()
        } else {
            format!("; excluded: {}", report.excluded.join(", "))
        }
    );
    Ok(())
}
