//! `report`: assemble the report bundle from a directory of result files.
//!
//! Consumes test-result and reference-report JSON files. Emits the
//! significance grid, the normalized-statistic grid, per-corpus histogram
//! data, a summary index, and the reference-distribution histogram when a
//! reference report is present. Top-terms and statistics CSVs already in
//! the results directory are copied into the bundle.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use corpusbias::crosscorpus::CrossCorpusReport;
use corpusbias::report::{histogram_csv, normalized_grid, report_index, significance_grid};
use corpusbias::weat::WeatResult;

use super::{create_dir, finish_manifest, write_json, write_text, Ctx};
use crate::{internal, invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of WeatResult / reference-report JSON files.
    #[arg(long)]
    results: PathBuf,
    /// Output directory for the bundle.
    #[arg(long)]
    out: PathBuf,
}

enum Loaded {
    Weat(Box<WeatResult>),
    Reference(Box<CrossCorpusReport>),
}

fn load_file(path: &Path) -> Option<Loaded> {
    let text = fs::read_to_string(path).ok()?;
    if let Ok(result) = serde_json::from_str::<WeatResult>(&text) {
        return Some(Loaded::Weat(Box::new(result)));
    }
    if let Ok(report) = serde_json::from_str::<CrossCorpusReport>(&text) {
        return Some(Loaded::Reference(Box::new(report)));
    }
    None
}

fn observed_csv(report: &CrossCorpusReport) -> String {
    let mut out = String::from("label,value,significant\n");
    for item in &report.observed {
        let _ = writeln!(
            out,
            "{},{},{}",
            item.label,
            item.value,
            if item.significant { "yes" } else { "no" }
        );
    }
    out
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(&args.results)
        .with_context(|| format!("cannot read {}", args.results.display()))
        .map_err(invalid)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();

    let mut results: Vec<WeatResult> = Vec::new();
    let mut references: Vec<(String, CrossCorpusReport)> = Vec::new();
    let mut copied: Vec<PathBuf> = Vec::new();
    create_dir(&args.out)?;

    for path in &entries {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_string();
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") if name != "manifest.json" && !name.ends_with(".manifest.json") => {
                match load_file(path) {
                    Some(Loaded::Weat(result)) => results.push(*result),
                    Some(Loaded::Reference(report)) => references.push((name, *report)),
                    None => log::debug!("{}: not a recognized result file", path.display()),
                }
            }
            Some("csv") => {
                // carry top-terms / statistics tables into the bundle
                let dest = args.out.join(&name);
                fs::copy(path, &dest)
                    .with_context(|| format!("cannot copy {}", path.display()))
                    .map_err(internal)?;
                copied.push(dest);
            }
            _ => {}
        }
    }
    results.sort_by(|a, b| a.corpus.cmp(&b.corpus));

    let mut manifest = ctx.manifest("report");
    manifest.set_config("results", args.results.display());
    manifest.set_config("tests", results.len());
    manifest.set_config("references", references.len());

    let mut written: Vec<PathBuf> = Vec::new();
    let significance_path = args.out.join("significance_grid.csv");
    write_text(&significance_path, &significance_grid(&results).to_csv("period"))?;
    written.push(significance_path);
    let normalized_path = args.out.join("normalized_grid.csv");
    write_text(&normalized_path, &normalized_grid(&results).to_csv("period"))?;
    written.push(normalized_path);
    let index_path = args.out.join("report_index.json");
    write_json(&index_path, &report_index(&results))?;
    written.push(index_path);
    for result in &results {
        let path = args.out.join(format!("hist_{}.csv", result.corpus));
        write_text(&path, &histogram_csv(result))?;
        written.push(path);
    }
    for (name, report) in &references {
        let stem = name.trim_end_matches(".json");
        let hist_path = args.out.join(format!("reference_histogram_{stem}.csv"));
        let mut hist = String::from("reference_difference\n");
        for d in &report.reference {
            let _ = writeln!(hist, "{d}");
        }
        write_text(&hist_path, &hist)?;
        written.push(hist_path);
        if !report.observed.is_empty() {
            let observed_path = args.out.join(format!("observed_differences_{stem}.csv"));
            write_text(&observed_path, &observed_csv(report))?;
            written.push(observed_path);
        }
    }
    written.extend(copied);

    let outputs: Vec<&Path> = written.iter().map(PathBuf::as_path).collect();
    finish_manifest(
        manifest,
        &[args.results.as_path()],
        &outputs,
        &args.out.join("manifest.json"),
    )?;

    println!(
        "report bundle: {} test results, {} reference reports, {} files",
        results.len(),
        references.len(),
        outputs.len(),
    );
    Ok(())
}
