//! `compare`: judge observed cross-corpus differences against a reference
//! report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use corpusbias::crosscorpus::{
    mean_pairwise_difference, normalized_stat, significance, CrossCorpusReport, NormalizedStat,
    ObservedDifference,
};
use corpusbias::weat::WeatResult;

use super::{finish_manifest, sidecar_manifest_path, write_json, Ctx};
use crate::{invalid, CliError};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of result JSON files from `weat`.
    #[arg(long)]
    results: PathBuf,
    /// Reference report JSON from `make-reference`.
    #[arg(long)]
    reference: PathBuf,
    /// Significance level for the comparison.
    #[arg(long)]
    alpha: Option<f64>,
    /// Ordered corpus pair `FIRST,SECOND`; the difference is
    /// normalized(FIRST) - normalized(SECOND). Repeatable. Without any
    /// pair flags, all unordered pairs are compared (lower name minus
    /// higher name).
    #[arg(long = "pair")]
    pairs: Vec<String>,
    /// Region pair `FIRST,SECOND`: mean over aligned periods of the
    /// normalized-statistic differences. Repeatable.
    #[arg(long = "mean-pair")]
    mean_pairs: Vec<String>,
    /// Use absolute distances in --mean-pair aggregation.
    #[arg(long)]
    absolute: bool,
    /// Write the reference report with observed differences attached.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_results(dir: &Path) -> Result<Vec<WeatResult>, CliError> {
    let mut results = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))
        .map_err(invalid)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    for path in entries {
        let text = fs::read_to_string(&path)
            .with_context(|| format!("cannot read {}", path.display()))
            .map_err(invalid)?;
        match serde_json::from_str::<WeatResult>(&text) {
            Ok(result) => results.push(result),
            Err(_) => log::debug!("{} is not a test result; skipped", path.display()),
        }
    }
    Ok(results)
}

fn split_pair(raw: &str, flag: &str) -> Result<(String, String), CliError> {
    raw.split_once(',')
        .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .ok_or_else(|| invalid(anyhow!("--{flag} expects `FIRST,SECOND`, got {raw:?}")))
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let level = ctx
        .config
        .resolve(&args.alpha, "alpha", 0.05)
        .map_err(invalid)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(anyhow!("alpha must be in (0, 1)")));
    }
    let text = fs::read_to_string(&args.reference)
        .with_context(|| format!("cannot read {}", args.reference.display()))
        .map_err(invalid)?;
    let mut report: CrossCorpusReport = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a reference report", args.reference.display()))
        .map_err(invalid)?;

    let results = load_results(&args.results)?;
    let mut stats: BTreeMap<String, NormalizedStat> = BTreeMap::new();
    for result in &results {
        match normalized_stat(result) {
            Ok(stat) => {
                stats.insert(result.corpus.clone(), stat);
            }
            Err(e) => log::warn!("skipping {}: {e}", result.corpus),
        }
    }
    if stats.is_empty() {
        return Err(invalid(anyhow!(
            "no usable test results in {}",
            args.results.display()
        )));
    }

    let lookup = |name: &str| -> Result<&NormalizedStat, CliError> {
        stats
            .get(name)
            .ok_or_else(|| invalid(anyhow!("no result for corpus {name:?}")))
    };

    let mut observed: Vec<ObservedDifference> = Vec::new();
    if args.pairs.is_empty() && args.mean_pairs.is_empty() {
        let names: Vec<&String> = stats.keys().collect();
        for i in 0..names.len() {
            for j in (i + 1)..names.len() {
                let value = stats[names[i]].value - stats[names[j]].value;
                observed.push(ObservedDifference {
                    label: format!("{}-{}", names[i], names[j]),
                    value,
                    significant: false,
                });
            }
        }
    }
    for raw in &args.pairs {
        let (first, second) = split_pair(raw, "pair")?;
        let value = lookup(&first)?.value - lookup(&second)?.value;
        observed.push(ObservedDifference {
            label: format!("{first}-{second}"),
            value,
            significant: false,
        });
    }
    for raw in &args.mean_pairs {
        let (first, second) = split_pair(raw, "mean-pair")?;
        let collect = |region: &str| -> Vec<NormalizedStat> {
            let mut column: Vec<NormalizedStat> = stats
                .values()
                .filter(|s| {
                    s.corpus
                        .split_once('_')
                        .is_some_and(|(r, _)| r == region)
                })
                .cloned()
                .collect();
            column.sort_by(|a, b| a.corpus.cmp(&b.corpus));
            column
        };
        let a = collect(&first);
        let b = collect(&second);
        if a.is_empty() || b.is_empty() {
            return Err(invalid(anyhow!(
                "--mean-pair {raw}: no results for one of the regions"
            )));
        }
        let value = mean_pairwise_difference(&a, &b, args.absolute).map_err(invalid)?;
        observed.push(ObservedDifference {
            label: format!(
                "mean:{first}-{second}{}",
                if args.absolute { ":absolute" } else { "" }
            ),
            value,
            significant: false,
        });
    }

    for item in &mut observed {
        item.significant = significance(item.value, &report, level).map_err(invalid)?;
        println!(
            "{}: {:.4} {} (threshold {:.4} at level {})",
            item.label,
            item.value,
            if item.significant { "significant" } else { "not significant" },
            corpusbias::crosscorpus::empirical_quantile(&report.reference, 1.0 - level),
            level,
        );
    }
    println!(
        "{} result(s), {} comparison(s) against {} reference differences",
        stats.len(),
        observed.len(),
        report.reference.len(),
    );

    if let Some(out) = &args.out {
        let mut manifest = ctx.manifest("compare");
        manifest.set_config("alpha", level);
        manifest.set_config("results", args.results.display());
        manifest.set_config("reference", args.reference.display());
        manifest.set_config("absolute", args.absolute);
        let manifest_path = sidecar_manifest_path(out);
        report.level = level;
        report.observed = observed;
        report.manifest = manifest_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned());
        write_json(out, &report)?;
        finish_manifest(
            manifest,
            &[args.results.as_path(), args.reference.as_path()],
            &[out.as_path()],
            &manifest_path,
        )?;
    }
    Ok(())
}
