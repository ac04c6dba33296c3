//! Emission of the analysis tables: region-by-period grids, per-corpus
//! histogram data, and top-terms tables.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{term_frequencies_pooled, CorpusShard, ShardStats, REGIONS};
use crate::crosscorpus::empirical_quantile;
use crate::weat::WeatResult;

/// Region-by-period string grid. Missing cells stay `None` and render as
/// explicit gaps, never fabricated values.
#[derive(Debug, Clone)]
pub struct Grid {
    /// Column labels: the five canonical regions, then any others found.
    pub columns: Vec<String>,
    /// (period label, one cell per column), sorted by period.
    pub rows: Vec<(String, Vec<Option<String>>)>,
}

impl Grid {
    pub fn to_csv(&self, corner: &str) -> String {
        let mut out = String::new();
        out.push_str(corner);
        for c in &self.columns {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
        for (label, cells) in &self.rows {
            out.push_str(label);
            for cell in cells {
                let _ = write!(out, ",{}", cell.as_deref().unwrap_or(""));
            }
            out.push('\n');
        }
        out
    }
}

fn split_label(label: &str) -> (String, String) {
    match label.split_once('_') {
        Some((region, period)) => (region.to_string(), period.to_string()),
        None => (label.to_string(), String::new()),
    }
}

/// Arrange per-corpus cells into the canonical grid.
fn grid_of(results: &[WeatResult], cell: impl Fn(&WeatResult) -> String) -> Grid {
    let mut extra_regions: BTreeSet<String> = BTreeSet::new();
    let mut periods: BTreeSet<String> = BTreeSet::new();
    for r in results {
        let (region, period) = split_label(&r.corpus);
        if !REGIONS.contains(&region.as_str()) {
            extra_regions.insert(region);
        }
        periods.insert(period);
    }
    let columns: Vec<String> = REGIONS
        .iter()
        .map(|r| r.to_string())
        .chain(extra_regions)
        .collect();
    let mut rows: Vec<(String, Vec<Option<String>>)> = periods
        .into_iter()
        .map(|p| (p, vec![None; columns.len()]))
        .collect();
    for r in results {
        let (region, period) = split_label(&r.corpus);
        let col = columns.iter().position(|c| *c == region).expect("column exists");
        let row = rows.iter_mut().find(|(p, _)| *p == period).expect("row exists");
        row.1[col] = Some(cell(r));
    }
    Grid { columns, rows }
}

/// Significance grid (yes/no cells).
pub fn significance_grid(results: &[WeatResult]) -> Grid {
    grid_of(results, |r| {
        if r.significant { "yes".into() } else { "no".into() }
    })
}

/// Normalized-statistic grid, four decimals; tests with a degenerate
/// randomized sample render as `undefined`.
pub fn normalized_grid(results: &[WeatResult]) -> Grid {
    grid_of(results, |r| match r.normalized {
        Some(v) => format!("{v:.4}"),
        None => "undefined".into(),
    })
}

/// Region-by-period counts grid from shard statistics rows.
pub fn counts_grid(stats: &[ShardStats], tokens: bool) -> Grid {
    let mut extra_regions: BTreeSet<String> = BTreeSet::new();
    let mut periods: BTreeSet<String> = BTreeSet::new();
    for s in stats {
        if !REGIONS.contains(&s.region.as_str()) {
            extra_regions.insert(s.region.clone());
        }
        periods.insert(s.period.clone());
    }
    let columns: Vec<String> = REGIONS
        .iter()
        .map(|r| r.to_string())
        .chain(extra_regions)
        .collect();
    let mut rows: Vec<(String, Vec<Option<String>>)> = periods
        .into_iter()
        .map(|p| (p, vec![None; columns.len()]))
        .collect();
    for s in stats {
        let col = columns.iter().position(|c| *c == s.region).expect("column exists");
        let row = rows.iter_mut().find(|(p, _)| *p == s.period).expect("row exists");
        row.1[col] = Some(if tokens {
            s.tokens.to_string()
        } else {
            s.documents.to_string()
        });
    }
    Grid { columns, rows }
}

/// Histogram data for one result: the full randomized sample, one value
/// per line.
pub fn histogram_csv(result: &WeatResult) -> String {
    let mut out = String::from("randomized_statistic\n");
    for t in &result.randomized {
        let _ = writeln!(out, "{t}");
    }
    out
}

/// Summary row accompanying the per-corpus histogram files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportIndexEntry {
    pub corpus: String,
    pub observed: f64,
    pub normalized: Option<f64>,
    pub p_value: f64,
    pub significant: bool,
    /// Empirical (1 − alpha) quantile of the randomized sample: the
    /// histogram's significance cutoff.
    pub threshold: f64,
}

pub fn report_index(results: &[WeatResult]) -> Vec<ReportIndexEntry> {
    let mut entries: Vec<ReportIndexEntry> = results
        .iter()
        .map(|r| ReportIndexEntry {
            corpus: r.corpus.clone(),
            observed: r.observed,
            normalized: r.normalized,
            p_value: r.p_value,
            significant: r.significant,
            threshold: empirical_quantile(&r.randomized, 1.0 - r.alpha),
        })
        .collect();
    entries.sort_by(|a, b| a.corpus.cmp(&b.corpus));
    entries
}

/// Top-k terms pooled per period across all regions, sorted by period.
pub fn top_terms_by_period(shards: &[CorpusShard], k: usize) -> Vec<(String, Vec<(String, u64)>)> {
    top_terms_grouped(shards, k, |shard| split_label(&shard.name).1)
}

/// Top-k terms pooled per region across all periods, in canonical region
/// order.
pub fn top_terms_by_region(shards: &[CorpusShard], k: usize) -> Vec<(String, Vec<(String, u64)>)> {
    let mut rows = top_terms_grouped(shards, k, |shard| split_label(&shard.name).0);
    let rank = |r: &str| REGIONS.iter().position(|c| *c == r).unwrap_or(REGIONS.len());
    rows.sort_by(|a, b| rank(&a.0).cmp(&rank(&b.0)).then_with(|| a.0.cmp(&b.0)));
    rows
}

fn top_terms_grouped(
    shards: &[CorpusShard],
    k: usize,
    group: impl Fn(&CorpusShard) -> String,
) -> Vec<(String, Vec<(String, u64)>)> {
    let mut groups: BTreeSet<String> = BTreeSet::new();
    for s in shards {
        groups.insert(group(s));
    }
    groups
        .into_iter()
        .map(|g| {
            let members: Vec<&CorpusShard> =
                shards.iter().filter(|s| group(s) == g).collect();
            (g, term_frequencies_pooled(members, k))
        })
        .collect()
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Render a top-terms table: one row per group, terms joined in frequency
/// order.
pub fn top_terms_csv(rows: &[(String, Vec<(String, u64)>)], label_header: &str) -> String {
    let mut out = format!("{label_header},terms\n");
    for (label, terms) in rows {
        let joined = terms
            .iter()
            .map(|(t, _)| t.as_str())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "{},{}", csv_quote(label), csv_quote(&joined));
    }
    out
}

/// Per-shard term counts table.
pub fn term_counts_csv(terms: &[(String, u64)]) -> String {
    let mut out = String::from("term,count\n");
    for (t, c) in terms {
        let _ = writeln!(out, "{},{c}", csv_quote(t));
    }
    out
}
