//! `stats`: descriptive statistics and top-terms tables for a shard
//! directory.

use std::path::PathBuf;
use std::time::Instant;

use corpusbias::corpus::{load_shard_dir, shard_stats, stats_csv, term_frequencies};
use corpusbias::report::{
    counts_grid, term_counts_csv, top_terms_by_period, top_terms_by_region, top_terms_csv,
};

use super::{create_dir, finish_manifest, write_text, Ctx};
use crate::{invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of shard files.
    #[arg(long)]
    shards: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Terms per top-terms table.
    #[arg(long = "top-k")]
    top_k: Option<usize>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let top_k = ctx
        .config
        .resolve(&args.top_k, "top-k", 10)
        .map_err(invalid)?;
    if top_k == 0 {
        return Err(invalid(anyhow::anyhow!("--top-k must be >= 1")));
    }
    let shards = load_shard_dir(&args.shards).map_err(invalid)?;

    let mut manifest = ctx.manifest("stats");
    manifest.set_config("shards", args.shards.display());
    manifest.set_config("top-k", top_k);

    let started = Instant::now();
    let rows = shard_stats(&shards);
    create_dir(&args.out)?;
    let mut written = Vec::new();

    let stats_path = args.out.join("stats.csv");
    write_text(&stats_path, &stats_csv(&rows))?;
    written.push(stats_path);

    let docs_grid = args.out.join("counts_documents.csv");
    write_text(&docs_grid, &counts_grid(&rows, false).to_csv("period"))?;
    written.push(docs_grid);
    let tokens_grid = args.out.join("counts_tokens.csv");
    write_text(&tokens_grid, &counts_grid(&rows, true).to_csv("period"))?;
    written.push(tokens_grid);

    let by_period = top_terms_by_period(&shards, top_k);
    let period_path = args.out.join("top_terms_by_period.csv");
    write_text(&period_path, &top_terms_csv(&by_period, "period"))?;
    written.push(period_path);
    let by_region = top_terms_by_region(&shards, top_k);
    let region_path = args.out.join("top_terms_by_region.csv");
    write_text(&region_path, &top_terms_csv(&by_region, "region"))?;
    written.push(region_path);

    for shard in &shards {
        let terms = term_frequencies(shard, top_k);
        let path = args.out.join(format!("terms_{}.csv", shard.name));
        write_text(&path, &term_counts_csv(&terms))?;
        written.push(path);
    }
    manifest.record_timing("stats", started.elapsed());

    let outputs: Vec<&std::path::Path> = written.iter().map(PathBuf::as_path).collect();
    finish_manifest(
        manifest,
        &[args.shards.as_path()],
        &outputs,
        &args.out.join("manifest.json"),
    )?;

    print!("{}", counts_grid(&rows, false).to_csv("period"));
    println!("{} shards, {} tables written", shards.len(), outputs.len());
    Ok(())
}
