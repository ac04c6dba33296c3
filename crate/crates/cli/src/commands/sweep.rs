//! `sweep`: run the full pipeline over a list of synthetic-corpus specs.
//!
//! The spec file is line-oriented: each non-comment line is a set of
//! whitespace-separated `key=value` pairs. Recognized keys: `beta` and
//! `docs` (required), `seed`, `vocab`, `doc-len-min`, `doc-len-max`,
//! `x-markers`, `y-markers`, `a-terms`, `b-terms`.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context};
use corpusbias::seeding;
use corpusbias::synthgen::{sweep, sweep_csv, token_set, BiasSpec};

use super::{finish_manifest, sidecar_manifest_path, write_text, Ctx};
use crate::opts::{resolve_seed, TrainOpts, WeatOpts};
use crate::{invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Spec file: one synthetic corpus per line as `key=value` pairs.
    #[arg(long)]
    specs: PathBuf,
    /// Output CSV table.
    #[arg(long)]
    out: PathBuf,
    /// Base seed; per-line seeds default to streams derived from it.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    train: TrainOpts,
    #[command(flatten)]
    weat: WeatOpts,
}

fn parse_spec_line(line: &str, line_no: usize, default_seed: u64) -> anyhow::Result<BiasSpec> {
    let mut spec = BiasSpec {
        seed: default_seed,
        ..BiasSpec::default()
    };
    let mut beta = None;
    let mut docs = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| anyhow!("line {line_no}: expected key=value, got {field:?}"))?;
        let int = || -> anyhow::Result<usize> {
            value
                .parse()
                .map_err(|_| anyhow!("line {line_no}: {key}={value:?} is not an integer"))
        };
        match key {
            "beta" => {
                beta = Some(value.parse::<f64>().map_err(|_| {
                    anyhow!("line {line_no}: beta={value:?} is not a number")
                })?)
            }
            "docs" => docs = Some(int()?),
            "seed" => {
                spec.seed = value.parse().map_err(|_| {
                    anyhow!("line {line_no}: seed={value:?} is not an integer")
                })?
            }
            "vocab" => spec.background_vocab = int()?,
            "doc-len-min" => spec.doc_len.0 = int()?,
            "doc-len-max" => spec.doc_len.1 = int()?,
            "x-markers" => spec.x_markers = token_set("xmark", int()?),
            "y-markers" => spec.y_markers = token_set("ymark", int()?),
            "a-terms" => spec.a_terms = token_set("aterm", int()?),
            "b-terms" => spec.b_terms = token_set("bterm", int()?),
            other => return Err(anyhow!("line {line_no}: unknown key {other:?}")),
        }
    }
    spec.beta = beta.ok_or_else(|| anyhow!("line {line_no}: missing beta"))?;
    spec.documents = docs.ok_or_else(|| anyhow!("line {line_no}: missing docs"))?;
    Ok(spec)
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let base_seed = resolve_seed(args.seed, &ctx.config).map_err(invalid)?;
    let train_cfg = args
        .train
        .resolve(&ctx.config, base_seed, ctx.threads)
        .map_err(invalid)?;
    train_cfg.validate().map_err(invalid)?;
    let weat_cfg = args.weat.resolve(&ctx.config, base_seed).map_err(invalid)?;
    weat_cfg.validate().map_err(invalid)?;

    let text = fs::read_to_string(&args.specs)
        .with_context(|| format!("cannot read {}", args.specs.display()))
        .map_err(invalid)?;
    let mut specs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let spec = parse_spec_line(line, i + 1, seeding::derive(base_seed, specs.len() as u64))
            .map_err(invalid)?;
        spec.validate().map_err(invalid)?;
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(invalid(anyhow!("no specs in {}", args.specs.display())));
    }

    let mut manifest = ctx.manifest("sweep");
    manifest.seed = Some(base_seed);
    manifest.set_config("specs", specs.len());
    manifest.set_config("dim", train_cfg.dimension);
    manifest.set_config("iters", train_cfg.iterations);
    manifest.set_config("shuffles", weat_cfg.shuffles);
    manifest.set_config("threads", ctx.threads);

    let started = Instant::now();
    let rows = sweep(&specs, &train_cfg, &weat_cfg);
    manifest.record_timing("sweep", started.elapsed());

    let csv = sweep_csv(&rows);
    write_text(&args.out, &csv)?;
    finish_manifest(
        manifest,
        &[args.specs.as_path()],
        &[args.out.as_path()],
        &sidecar_manifest_path(&args.out),
    )?;
    print!("{csv}");
    Ok(())
}
