//! Cross-corpus bias comparison.
//!
//! Statistics from different embedding spaces are not directly comparable,
//! so each corpus's observed statistic is first normalized by the standard
//! deviation of its own randomized sample. Differences between normalized
//! statistics are judged against a reference distribution built from
//! synthetically recombined corpora: K corpora give K·(K−1)/2 pairwise
//! differences, and an observed difference is significant when it exceeds
//! the empirical (1 − level) quantile of that reference.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{document_byte_size, CorpusShard};
use crate::embedding::EmbeddingSet;
use crate::seeding;
use crate::weat::{
    population_stdev, randomization_test, StatisticKind, WeatConfig, WeatResult, WordSets,
};

#[derive(Debug, Error)]
pub enum CrossCorpusError {
    #[error("normalized statistic undefined for {corpus:?}: randomized sample has zero stdev")]
    UndefinedStat { corpus: String },
    #[error("invalid synthetic-corpus spec: {0}")]
    InvalidSpec(String),
    #[error("insufficient source data: need {required} bytes, have {available}")]
    InsufficientData { required: u64, available: u64 },
    #[error("period labels do not align: {left:?} vs {right:?}")]
    LabelMismatch { left: String, right: String },
    #[error("reference distribution is empty")]
    EmptyReference,
    #[error("fewer than two corpora produced a valid test ({got} left)")]
    TooFewCorpora { got: usize },
}

/// A corpus's observed statistic divided by the stdev of its randomized
/// sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizedStat {
    pub corpus: String,
    pub value: f64,
}

/// Recompute the normalized statistic from a stored result.
pub fn normalized_stat(result: &WeatResult) -> Result<NormalizedStat, CrossCorpusError> {
    let stdev = population_stdev(&result.randomized);
    if !stdev.is_finite() || stdev <= 0.0 {
        return Err(CrossCorpusError::UndefinedStat {
            corpus: result.corpus.clone(),
        });
    }
    Ok(NormalizedStat {
        corpus: result.corpus.clone(),
        value: result.observed / stdev,
    })
}

/// Ordered difference of two normalized statistics.
pub fn stat_difference(v: &NormalizedStat, w: &NormalizedStat) -> f64 {
    v.value - w.value
}

// ---------------------------------------------------------------------------
// Synthetic reference corpora

/// Recipe for the synthetic reference corpora.
#[derive(Debug, Clone)]
pub struct SyntheticCorpusSpec {
    /// Number of corpora K.
    pub count: usize,
    pub min_bytes: u64,
    pub max_bytes: u64,
    /// Documents per sampled contiguous segment.
    pub segment_docs: usize,
    pub seed: u64,
}

impl Default for SyntheticCorpusSpec {
    /// Desk-scale defaults: K = 20, 1–2 MB, 50-document segments.
    fn default() -> Self {
        SyntheticCorpusSpec {
            count: 20,
            min_bytes: 1_000_000,
            max_bytes: 2_000_000,
            segment_docs: 50,
            seed: 0,
        }
    }
}

impl SyntheticCorpusSpec {
    pub fn validate(&self) -> Result<(), CrossCorpusError> {
        if self.count < 2 {
            return Err(CrossCorpusError::InvalidSpec("count must be >= 2".into()));
        }
        if self.min_bytes == 0 || self.min_bytes > self.max_bytes {
            return Err(CrossCorpusError::InvalidSpec(format!(
                "size range [{}, {}] is empty",
                self.min_bytes, self.max_bytes
            )));
        }
        if self.segment_docs < 1 {
            return Err(CrossCorpusError::InvalidSpec(
                "segment length must be >= 1 document".into(),
            ));
        }
        Ok(())
    }
}

/// Assemble K corpora named `ref-00`, `ref-01`, ... by sampling contiguous document
/// segments (with replacement) uniformly across all source documents.
///
/// Each corpus grows document by document toward a target size drawn
/// uniformly from [min_bytes, max_bytes] and never exceeds max_bytes, so
/// generated sizes stay within the configured range whenever single
/// documents are small against it. Seeded and deterministic.
pub fn generate_reference_corpora(
    sources: &[CorpusShard],
    spec: &SyntheticCorpusSpec,
) -> Result<Vec<CorpusShard>, CrossCorpusError> {
    spec.validate()?;
    let total_docs: usize = sources.iter().map(|s| s.document_count()).sum();
    if total_docs == 0 {
        return Err(CrossCorpusError::InvalidSpec(
            "source shards contain no documents".into(),
        ));
    }
    let available: u64 = sources.iter().map(|s| s.byte_size()).sum();
    if available < spec.max_bytes {
        return Err(CrossCorpusError::InsufficientData {
            required: spec.max_bytes,
            available,
        });
    }
    // prefix sums for uniform document addressing across shards
    let mut starts = Vec::with_capacity(sources.len());
    let mut acc = 0usize;
    for s in sources {
        starts.push(acc);
        acc += s.document_count();
    }
    let locate = |g: usize| -> (usize, usize) {
        let shard = starts.partition_point(|&s| s <= g) - 1;
        (shard, g - starts[shard])
    };

    let corpora = (0..spec.count)
        .map(|k| {
            let mut rng = seeding::stream_rng(spec.seed, k as u64);
            let target = rng.random_range(spec.min_bytes..=spec.max_bytes);
            let mut shard = CorpusShard::new(format!("ref-{k:02}"));
            let mut size = 0u64;
            'grow: while size < target {
                let g = rng.random_range(0..total_docs);
                let (si, start) = locate(g);
                let docs = &sources[si].documents;
                let end = (start + spec.segment_docs).min(docs.len());
                for doc in &docs[start..end] {
                    if size >= target {
                        break 'grow;
                    }
                    let doc_size = document_byte_size(doc);
                    if size + doc_size > spec.max_bytes {
                        break 'grow;
                    }
                    shard.documents.push(doc.clone());
                    size += doc_size;
                }
            }
            shard
        })
        .collect();
    Ok(corpora)
}

// ---------------------------------------------------------------------------
// Reference distribution and significance

/// Per-corpus row of the reference report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusRefEntry {
    pub corpus: String,
    pub observed: f64,
    pub normalized: f64,
    pub p_value: f64,
    pub significant: bool,
}

/// An observed cross-corpus difference judged against the reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservedDifference {
    pub label: String,
    pub value: f64,
    pub significant: bool,
}

/// The reference distribution plus any observed comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCorpusReport {
    /// Significance level the threshold was computed at.
    pub level: f64,
    /// Shuffle count used for every per-corpus randomization test.
    pub shuffles: usize,
    pub statistic: StatisticKind,
    /// Per-corpus test summaries, ordered by corpus name.
    pub corpora: Vec<CorpusRefEntry>,
    /// Corpora excluded because their test was invalid.
    pub excluded: Vec<String>,
    /// K·(K−1)/2 pairwise differences, lower-named corpus minus
    /// higher-named corpus, in pair order.
    pub reference: Vec<f64>,
    /// Empirical (1 − level) quantile of `reference`.
    pub threshold: f64,
    pub observed: Vec<ObservedDifference>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest: Option<String>,
}

/// One ordered difference per unordered pair: lower-indexed value minus
/// higher-indexed value, pairs in (i, j) order. n values give
/// n·(n−1)/2 differences.
pub fn pairwise_differences(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() * values.len().saturating_sub(1) / 2);
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            out.push(values[i] - values[j]);
        }
    }
    out
}

/// Empirical quantile: the smallest sample value with at least ceil(q·n)
/// sample points at or below it.
pub fn empirical_quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite reference values"));
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Run the randomization test on every corpus and assemble the reference
/// distribution of pairwise normalized differences.
///
/// Corpora whose test is invalid (or whose randomized sample has zero
/// stdev) are excluded with a warning and K shrinks. Per-corpus shuffle
/// streams derive from the corpus name, so the report is invariant to the
/// order of the input list.
pub fn reference_distribution(
    corpora: &[(String, EmbeddingSet)],
    sets: &WordSets,
    cfg: &WeatConfig,
) -> Result<CrossCorpusReport, CrossCorpusError> {
    let outcomes: Vec<(String, Result<WeatResult, crate::weat::WeatError>)> = corpora
        .par_iter()
        .map(|(name, embeddings)| {
            let corpus_cfg = WeatConfig {
                seed: seeding::derive_labeled(cfg.seed, name),
                ..cfg.clone()
            };
            let result = randomization_test(sets, embeddings, &corpus_cfg).map(|mut r| {
                r.corpus = name.clone();
                r
            });
            (name.clone(), result)
        })
        .collect();

    let mut entries: Vec<CorpusRefEntry> = Vec::new();
    let mut excluded = Vec::new();
    for (name, outcome) in outcomes {
        match outcome.map(|r| (normalized_stat(&r), r)) {
            Ok((Ok(norm), r)) => entries.push(CorpusRefEntry {
                corpus: name,
                observed: r.observed,
                normalized: norm.value,
                p_value: r.p_value,
                significant: r.significant,
            }),
            Ok((Err(e), _)) => {
                log::warn!("excluding corpus {name:?}: {e}");
                excluded.push(name);
            }
            Err(e) => {
                log::warn!("excluding corpus {name:?}: {e}");
                excluded.push(name);
            }
        }
    }
    entries.sort_by(|a, b| a.corpus.cmp(&b.corpus));
    if entries.len() < 2 {
        return Err(CrossCorpusError::TooFewCorpora { got: entries.len() });
    }

    let normalized: Vec<f64> = entries.iter().map(|e| e.normalized).collect();
    let reference = pairwise_differences(&normalized);
    let threshold = empirical_quantile(&reference, 1.0 - cfg.alpha);

    Ok(CrossCorpusReport {
        level: cfg.alpha,
        shuffles: cfg.shuffles,
        statistic: cfg.statistic,
        corpora: entries,
        excluded,
        reference,
        threshold,
        observed: Vec::new(),
        manifest: None,
    })
}

/// Observed difference is significant iff it strictly exceeds the empirical
/// (1 − level) quantile of the reference differences.
pub fn significance(
    observed: f64,
    report: &CrossCorpusReport,
    level: f64,
) -> Result<bool, CrossCorpusError> {
    if report.reference.is_empty() {
        return Err(CrossCorpusError::EmptyReference);
    }
    Ok(observed > empirical_quantile(&report.reference, 1.0 - level))
}

/// Mean over aligned periods of (a_t − b_t), or of |a_t − b_t| with
/// `absolute`. Entries align by the period suffix of their corpus labels.
pub fn mean_pairwise_difference(
    a: &[NormalizedStat],
    b: &[NormalizedStat],
    absolute: bool,
) -> Result<f64, CrossCorpusError> {
    if a.is_empty() || a.len() != b.len() {
        return Err(CrossCorpusError::LabelMismatch {
            left: format!("{} entries", a.len()),
            right: format!("{} entries", b.len()),
        });
    }
    let period = |label: &str| -> String {
        label
            .split_once('_')
            .map(|(_, p)| p.to_string())
            .unwrap_or_else(|| label.to_string())
    };
    let mut total = 0.0;
    for (va, vb) in a.iter().zip(b.iter()) {
        let (pa, pb) = (period(&va.corpus), period(&vb.corpus));
        if pa != pb {
            return Err(CrossCorpusError::LabelMismatch {
                left: va.corpus.clone(),
                right: vb.corpus.clone(),
            });
        }
        let d = va.value - vb.value;
        total += if absolute { d.abs() } else { d };
    }
    Ok(total / a.len() as f64)
}
