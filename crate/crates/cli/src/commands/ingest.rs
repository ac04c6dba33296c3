//! `ingest`: JSONL records -> preprocessed region/period shard files.

use std::path::PathBuf;
use std::time::Instant;

use corpusbias::corpus::{
    self, ingest, parse_lemma_exceptions, parse_word_list, PeriodScheme, PreprocessConfig,
    RegionMap,
};
use corpusbias::report::counts_grid;

use super::{create_dir, finish_manifest, write_text, Ctx};
use crate::{internal, invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// JSONL document archive: a file or a directory of files.
    #[arg(long)]
    input: PathBuf,
    /// Jurisdiction-to-region map file (`CODE REGION` lines); default is
    /// the census mapping.
    #[arg(long)]
    regions: Option<PathBuf>,
    /// Period scheme file (`START END` lines, END exclusive); default is
    /// 30-year intervals over 1860-2009.
    #[arg(long)]
    periods: Option<PathBuf>,
    /// Output directory for shard files and statistics.
    #[arg(long)]
    out: PathBuf,
    /// Keep original casing.
    #[arg(long = "no-lowercase")]
    no_lowercase: bool,
    /// Keep stopwords.
    #[arg(long = "no-stopwords")]
    no_stopwords: bool,
    /// Skip lemmatization.
    #[arg(long = "no-lemmatize")]
    no_lemmatize: bool,
    /// Replace the shipped stopword list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Replace the shipped lemma-exceptions table.
    #[arg(long = "lemma-exceptions")]
    lemma_exceptions: Option<PathBuf>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let regions = match &args.regions {
        Some(path) => RegionMap::from_file(path).map_err(invalid)?,
        None => RegionMap::census_default(),
    };
    let periods = match &args.periods {
        Some(path) => PeriodScheme::from_file(path).map_err(invalid)?,
        None => PeriodScheme::thirty_year_default(),
    };
    let mut prep = PreprocessConfig {
        lowercase: !args.no_lowercase,
        remove_stopwords: !args.no_stopwords,
        lemmatize: !args.no_lemmatize,
        ..PreprocessConfig::default()
    };
    if let Some(path) = &args.stopwords {
        let text = std::fs::read_to_string(path).map_err(invalid)?;
        prep.stopwords = parse_word_list(&text).into_iter().collect();
    }
    if let Some(path) = &args.lemma_exceptions {
        let text = std::fs::read_to_string(path).map_err(invalid)?;
        prep.lemma_exceptions = parse_lemma_exceptions(&text).map_err(invalid)?;
    }
    prep.validate().map_err(invalid)?;

    let mut manifest = ctx.manifest("ingest");
    manifest.set_config("input", args.input.display());
    manifest.set_config("lowercase", prep.lowercase);
    manifest.set_config("remove-stopwords", prep.remove_stopwords);
    manifest.set_config("lemmatize", prep.lemmatize);
    manifest.set_config("threads", ctx.threads);

    let started = Instant::now();
    let report = ingest(&args.input, &regions, &periods, &prep).map_err(invalid)?;
    manifest.record_timing("ingest", started.elapsed());

    create_dir(&args.out)?;
    let mut written = Vec::new();
    for shard in &report.shards {
        let path = shard.save(&args.out).map_err(internal)?;
        written.push(path);
    }
    let stats = corpus::shard_stats(&report.shards);
    let stats_path = args.out.join("stats.csv");
    write_text(&stats_path, &corpus::stats_csv(&stats))?;
    written.push(stats_path);
    let docs_grid_path = args.out.join("counts_documents.csv");
    write_text(&docs_grid_path, &counts_grid(&stats, false).to_csv("period"))?;
    written.push(docs_grid_path);
    let tokens_grid_path = args.out.join("counts_tokens.csv");
    write_text(&tokens_grid_path, &counts_grid(&stats, true).to_csv("period"))?;
    written.push(tokens_grid_path);

    for diagnostic in report.diagnostics.iter().take(50) {
        log::warn!("{diagnostic}");
    }
    if report.diagnostics.len() > 50 {
        log::warn!("... {} further diagnostics", report.diagnostics.len() - 50);
    }

    let outputs: Vec<&std::path::Path> = written.iter().map(PathBuf::as_path).collect();
    finish_manifest(
        manifest,
        &[args.input.as_path()],
        &outputs,
        &args.out.join("manifest.json"),
    )?;

    println!(
        "read {} records: {} assigned across {} shards; skipped {} \
         (malformed {}, missing date {}, unknown jurisdiction {}, out of range {}, duplicate id {})",
        report.records_read,
        report.shards.iter().map(|s| s.document_count()).sum::<usize>(),
        report.shards.len(),
        report.skipped.total(),
        report.skipped.malformed,
        report.skipped.missing_date,
        report.skipped.unknown_jurisdiction,
        report.skipped.out_of_range,
        report.skipped.duplicate_id,
    );
    print!("{}", counts_grid(&stats, false).to_csv("period"));
    Ok(())
}
