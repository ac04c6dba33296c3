//! Word-association scores, the association-test statistic, and its
//! permutation randomization test within a single embedding set.
//!
//! The statistic contrasts two target word sets (X, Y) against two attribute
//! word sets (A, B). [`weat_statistic`] is the plain contrast
//! `sum_x s(x, A, B) - sum_y s(y, A, B)` with `s(w, A, B)` the mean-cosine
//! association of [`association`]. The randomization test reports its
//! observed statistic in the conventional bias orientation: positive values
//! mean the X targets sit nearer the B attributes and the Y targets nearer
//! the A attributes.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::parse_word_list;
use crate::embedding::EmbeddingSet;
use crate::seeding;

/// Shipped target name sets and polarity lexicon.
pub const NAMES_BLACK: &str = include_str!("../data/names_black.txt");
pub const NAMES_WHITE: &str = include_str!("../data/names_white.txt");
pub const POLARITY_LEXICON: &str = include_str!("../data/afinn_polarity.txt");

#[derive(Debug, Error)]
pub enum WeatError {
    #[error("word set {which} is empty")]
    EmptySet { which: &'static str },
    #[error("term {term:?} appears in both {first} and {second}")]
    Overlap {
        first: &'static str,
        second: &'static str,
        term: String,
    },
    #[error("term {term:?} has no vector")]
    UnresolvedTerm { term: String },
    #[error("resolved word set {which} is empty; the test is invalid")]
    EmptyResolvedSet { which: &'static str },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("polarity lexicon line {line}: {message}")]
    LexiconParse { line: usize, message: String },
}

fn io_err(path: &Path, source: io::Error) -> WeatError {
    WeatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

// ---------------------------------------------------------------------------
// Word sets

/// The four input word sets: X/Y targets and A/B attributes (A pleasant,
/// B unpleasant in the shipped defaults). All terms lowercase; the four
/// sets are pairwise disjoint.
#[derive(Debug, Clone)]
pub struct WordSets {
    pub x_targets: Vec<String>,
    pub y_targets: Vec<String>,
    pub a_attributes: Vec<String>,
    pub b_attributes: Vec<String>,
}

fn normalize_terms(terms: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut seen = HashSet::new();
    terms
        .into_iter()
        .map(|t| t.trim().to_lowercase())
        .filter(|t| !t.is_empty())
        .filter(|t| seen.insert(t.clone()))
        .collect()
}

impl WordSets {
    pub fn new(
        x_targets: Vec<String>,
        y_targets: Vec<String>,
        a_attributes: Vec<String>,
        b_attributes: Vec<String>,
    ) -> Result<Self, WeatError> {
        let sets = WordSets {
            x_targets: normalize_terms(x_targets),
            y_targets: normalize_terms(y_targets),
            a_attributes: normalize_terms(a_attributes),
            b_attributes: normalize_terms(b_attributes),
        };
        sets.validate()?;
        Ok(sets)
    }

    fn validate(&self) -> Result<(), WeatError> {
        let labeled: [(&'static str, &Vec<String>); 4] = [
            ("X", &self.x_targets),
            ("Y", &self.y_targets),
            ("A", &self.a_attributes),
            ("B", &self.b_attributes),
        ];
        for (which, terms) in &labeled {
            if terms.is_empty() {
                return Err(WeatError::EmptySet { which });
            }
        }
        for i in 0..labeled.len() {
            let (first, a) = labeled[i];
            let lookup: HashSet<&str> = a.iter().map(String::as_str).collect();
            for (second, b) in labeled.iter().skip(i + 1) {
                if let Some(term) = b.iter().find(|t| lookup.contains(t.as_str())) {
                    return Err(WeatError::Overlap {
                        first,
                        second,
                        term: term.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The shipped default sets: the two name lists plus pleasant/unpleasant
    /// attribute sets derived from the shipped polarity lexicon.
    pub fn builtin() -> Self {
        let (pleasant, unpleasant) =
            derive_polarity_sets(POLARITY_LEXICON).expect("shipped lexicon parses");
        WordSets::new(
            parse_word_list(NAMES_BLACK),
            parse_word_list(NAMES_WHITE),
            pleasant,
            unpleasant,
        )
        .expect("shipped word sets are valid")
    }

    /// Load `names_black.txt`, `names_white.txt`, `pleasant.txt`,
    /// `unpleasant.txt` from a directory.
    pub fn load_dir(dir: &Path) -> Result<Self, WeatError> {
        let read = |name: &str| -> Result<Vec<String>, WeatError> {
            let path = dir.join(name);
            let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
            Ok(parse_word_list(&text))
        };
        WordSets::new(
            read("names_black.txt")?,
            read("names_white.txt")?,
            read("pleasant.txt")?,
            read("unpleasant.txt")?,
        )
    }

    /// Write the four set files into a directory.
    pub fn write_dir(&self, dir: &Path) -> Result<(), WeatError> {
        let write = |name: &str, terms: &[String]| -> Result<(), WeatError> {
            let path = dir.join(name);
            let mut text = String::new();
            for t in terms {
                text.push_str(t);
                text.push('\n');
            }
            fs::write(&path, text).map_err(|e| io_err(&path, e))
        };
        write("names_black.txt", &self.x_targets)?;
        write("names_white.txt", &self.y_targets)?;
        write("pleasant.txt", &self.a_attributes)?;
        write("unpleasant.txt", &self.b_attributes)
    }
}

/// Split a polarity lexicon (`term<TAB>score` lines) into (pleasant,
/// unpleasant) term lists: positive scores are pleasant, negative
/// unpleasant, zero-scored entries and whitespace phrases are dropped.
pub fn derive_polarity_sets(lexicon: &str) -> Result<(Vec<String>, Vec<String>), WeatError> {
    let mut pleasant = Vec::new();
    let mut unpleasant = Vec::new();
    for (i, line) in lexicon.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((term, score)) = line.rsplit_once('\t') else {
            return Err(WeatError::LexiconParse {
                line: i + 1,
                message: format!("expected term<TAB>score, got {line:?}"),
            });
        };
        let score: i32 = score.trim().parse().map_err(|_| WeatError::LexiconParse {
            line: i + 1,
            message: format!("bad score {score:?}"),
        })?;
        let term = term.trim().to_lowercase();
        if term.split_whitespace().count() != 1 {
            continue; // phrase
        }
        if score > 0 {
            pleasant.push(term);
        } else if score < 0 {
            unpleasant.push(term);
        }
    }
    Ok((pleasant, unpleasant))
}

/// The subsets of the word sets that actually have vectors, plus the
/// dropped terms.
#[derive(Debug, Clone)]
pub struct ResolvedWordSets {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub dropped_x: Vec<String>,
    pub dropped_y: Vec<String>,
    pub dropped_a: Vec<String>,
    pub dropped_b: Vec<String>,
}

/// Partition each set by vocabulary membership.
pub fn resolve(sets: &WordSets, embeddings: &EmbeddingSet) -> ResolvedWordSets {
    let split = |terms: &[String]| -> (Vec<String>, Vec<String>) {
        terms
            .iter()
            .cloned()
            .partition(|t| embeddings.vector(t).is_some())
    };
    let (x, dropped_x) = split(&sets.x_targets);
    let (y, dropped_y) = split(&sets.y_targets);
    let (a, dropped_a) = split(&sets.a_attributes);
    let (b, dropped_b) = split(&sets.b_attributes);
    ResolvedWordSets {
        x,
        y,
        a,
        b,
        dropped_x,
        dropped_y,
        dropped_a,
        dropped_b,
    }
}

impl ResolvedWordSets {
    /// A test needs every resolved set non-empty.
    pub fn validate_for_test(&self) -> Result<(), WeatError> {
        for (which, set) in [("X", &self.x), ("Y", &self.y), ("A", &self.a), ("B", &self.b)] {
            if set.is_empty() {
                return Err(WeatError::EmptyResolvedSet { which });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Scores

/// Cosine similarity; zero vectors score 0.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v.iter()) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    dot / (nu.sqrt() * nv.sqrt())
}

/// Mean cosine of `w` to `a_terms` minus mean cosine of `w` to `b_terms`.
/// All terms must have vectors; both attribute lists must be non-empty.
pub fn association(
    embeddings: &EmbeddingSet,
    w: &str,
    a_terms: &[String],
    b_terms: &[String],
) -> Result<f64, WeatError> {
    let wv = embeddings
        .vector(w)
        .ok_or_else(|| WeatError::UnresolvedTerm { term: w.to_string() })?;
    let mean = |terms: &[String], which: &'static str| -> Result<f64, WeatError> {
        if terms.is_empty() {
            return Err(WeatError::EmptyResolvedSet { which });
        }
        let mut sum = 0.0;
        for t in terms {
            let tv = embeddings
                .vector(t)
                .ok_or_else(|| WeatError::UnresolvedTerm { term: t.clone() })?;
            sum += cosine(wv, tv);
        }
        Ok(sum / terms.len() as f64)
    };
    Ok(mean(a_terms, "A")? - mean(b_terms, "B")?)
}

/// Whether target associations are combined by plain sums (the reference
/// form, sensitive to unequal set sizes) or by means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    #[default]
    Sums,
    Means,
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StatisticKind::Sums => write!(f, "sums"),
            StatisticKind::Means => write!(f, "means"),
        }
    }
}

impl std::str::FromStr for StatisticKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sums" => Ok(StatisticKind::Sums),
            "means" => Ok(StatisticKind::Means),
            other => Err(format!("unknown statistic kind {other:?} (use sums|means)")),
        }
    }
}

/// Association contrast of the X targets versus the Y targets toward
/// (A, B): `sum_x s(x, A, B) - sum_y s(y, A, B)` (sums by default, means
/// with [`StatisticKind::Means`]). Positive values mean the X targets sit
/// nearer the A attributes.
pub fn weat_statistic(
    resolved: &ResolvedWordSets,
    embeddings: &EmbeddingSet,
    kind: StatisticKind,
) -> Result<f64, WeatError> {
    resolved.validate_for_test()?;
    let side = |targets: &[String]| -> Result<f64, WeatError> {
        let mut total = 0.0;
        for t in targets {
            total += association(embeddings, t, &resolved.a, &resolved.b)?;
        }
        Ok(match kind {
            StatisticKind::Sums => total,
            StatisticKind::Means => total / targets.len() as f64,
        })
    };
    Ok(side(&resolved.x)? - side(&resolved.y)?)
}

// ---------------------------------------------------------------------------
// Randomization test

/// Randomization-test parameters.
#[derive(Debug, Clone)]
pub struct WeatConfig {
    pub shuffles: usize,
    pub alpha: f64,
    pub seed: u64,
    pub statistic: StatisticKind,
}

impl Default for WeatConfig {
    fn default() -> Self {
        WeatConfig {
            shuffles: 1000,
            alpha: 0.05,
            seed: 0,
            statistic: StatisticKind::Sums,
        }
    }
}

impl WeatConfig {
    pub fn validate(&self) -> Result<(), WeatError> {
        if self.shuffles < 1 {
            return Err(WeatError::InvalidConfig("shuffles must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(WeatError::InvalidConfig("alpha must be in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Resolved set sizes and dropped-term counts recorded with a result.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ResolvedSizes {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
    pub dropped_x: usize,
    pub dropped_y: usize,
    pub dropped_a: usize,
    pub dropped_b: usize,
}

/// Everything the randomization test produces. The full randomized sample
/// is retained for histogram rendering and cross-corpus normalization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeatResult {
    /// Label of the corpus/embedding the test ran on.
    pub corpus: String,
    /// Observed statistic, oriented so positive values mean the X targets
    /// sit nearer the B attributes and the Y targets nearer the A
    /// attributes.
    pub observed: f64,
    /// Observed divided by the standard deviation of the randomized sample;
    /// absent when that deviation is zero.
    pub normalized: Option<f64>,
    /// Add-one right-tail estimate: (1 + #{t >= observed}) / (1 + N).
    pub p_value: f64,
    pub significant: bool,
    pub alpha: f64,
    pub shuffles: usize,
    pub statistic: StatisticKind,
    /// Orientation marker for the observed statistic.
    pub direction: String,
    pub resolved: ResolvedSizes,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest: Option<String>,
    pub randomized: Vec<f64>,
}

/// Population standard deviation of an empirical sample.
pub fn population_stdev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
    var.sqrt()
}

/// Precomputed name-by-attribute cosine matrix; shuffles only re-aggregate.
struct CosineMatrix {
    rows: usize,
    x_rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl CosineMatrix {
    fn build(resolved: &ResolvedWordSets, embeddings: &EmbeddingSet) -> CosineMatrix {
        let names: Vec<&String> = resolved.x.iter().chain(resolved.y.iter()).collect();
        let pool: Vec<&String> = resolved.a.iter().chain(resolved.b.iter()).collect();
        let mut values = Vec::with_capacity(names.len() * pool.len());
        for name in &names {
            let nv = embeddings.vector(name).expect("resolved names have vectors");
            for attr in &pool {
                let av = embeddings.vector(attr).expect("resolved attrs have vectors");
                values.push(cosine(nv, av));
            }
        }
        CosineMatrix {
            rows: names.len(),
            x_rows: resolved.x.len(),
            cols: pool.len(),
            values,
        }
    }

    fn mean_over(&self, row: usize, cols: &[usize]) -> f64 {
        let base = row * self.cols;
        let sum: f64 = cols.iter().map(|&c| self.values[base + c]).sum();
        sum / cols.len() as f64
    }

    /// Oriented statistic for an attribute split: positive when the X rows
    /// lean toward `b_cols` and the Y rows toward `a_cols`.
    fn oriented_statistic(&self, a_cols: &[usize], b_cols: &[usize], kind: StatisticKind) -> f64 {
        let mut x_total = 0.0;
        for row in 0..self.x_rows {
            x_total += self.mean_over(row, b_cols) - self.mean_over(row, a_cols);
        }
        let mut y_total = 0.0;
        for row in self.x_rows..self.rows {
            y_total += self.mean_over(row, b_cols) - self.mean_over(row, a_cols);
        }
        let y_rows = self.rows - self.x_rows;
        match kind {
            StatisticKind::Sums => x_total - y_total,
            StatisticKind::Means => x_total / self.x_rows as f64 - y_total / y_rows as f64,
        }
    }
}

/// Shuffle the pooled attribute indices into a pseudo-split that preserves
/// the original |A| and |B|. Both sides come back sorted so a given split
/// always evaluates to the bit-identical statistic regardless of the order
/// it was drawn in (ties at the observed value stay exact ties).
pub fn shuffle_split(
    pool_len: usize,
    a_len: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let mut indices: Vec<usize> = (0..pool_len).collect();
    indices.shuffle(rng);
    let mut pseudo_b = indices.split_off(a_len);
    indices.sort_unstable();
    pseudo_b.sort_unstable();
    (indices, pseudo_b)
}

/// Run the permutation randomization test.
///
/// Pools the resolved attribute sets and re-splits them `cfg.shuffles`
/// times into pseudo-categories of the original sizes, recomputing the
/// statistic each time. Each shuffle draws from a stream derived from
/// (seed, shuffle index), so the result is identical for any thread count.
pub fn randomization_test(
    sets: &WordSets,
    embeddings: &EmbeddingSet,
    cfg: &WeatConfig,
) -> Result<WeatResult, WeatError> {
    cfg.validate()?;
    let resolved = resolve(sets, embeddings);
    resolved.validate_for_test()?;
    if !resolved.dropped_x.is_empty()
        || !resolved.dropped_y.is_empty()
        || !resolved.dropped_a.is_empty()
        || !resolved.dropped_b.is_empty()
    {
        log::debug!(
            "dropped terms without vectors: X {} Y {} A {} B {}",
            resolved.dropped_x.len(),
            resolved.dropped_y.len(),
            resolved.dropped_a.len(),
            resolved.dropped_b.len()
        );
    }

    let matrix = CosineMatrix::build(&resolved, embeddings);
    let a_len = resolved.a.len();
    let b_len = resolved.b.len();
    let pool_len = a_len + b_len;

    let a_cols: Vec<usize> = (0..a_len).collect();
    let b_cols: Vec<usize> = (a_len..pool_len).collect();
    let observed = matrix.oriented_statistic(&a_cols, &b_cols, cfg.statistic);

    let randomized: Vec<f64> = (0..cfg.shuffles)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeding::stream_rng(cfg.seed, r as u64);
            let (pseudo_a, pseudo_b) = shuffle_split(pool_len, a_len, &mut rng);
            debug_assert_eq!(pseudo_a.len(), a_len);
            debug_assert_eq!(pseudo_b.len(), b_len);
            matrix.oriented_statistic(&pseudo_a, &pseudo_b, cfg.statistic)
        })
        .collect();

    let exceedances = randomized.iter().filter(|t| **t >= observed).count();
    let p_value = (1 + exceedances) as f64 / (1 + cfg.shuffles) as f64;
    let stdev = population_stdev(&randomized);
    let normalized = (stdev > 0.0).then(|| observed / stdev);

    Ok(WeatResult {
        corpus: String::new(),
        observed,
        normalized,
        p_value,
        significant: p_value <= cfg.alpha,
        alpha: cfg.alpha,
        shuffles: cfg.shuffles,
        statistic: cfg.statistic,
        direction: "x-near-b-positive".into(),
        resolved: ResolvedSizes {
            x: resolved.x.len(),
            y: resolved.y.len(),
            a: a_len,
            b: b_len,
            dropped_x: resolved.dropped_x.len(),
            dropped_y: resolved.dropped_y.len(),
            dropped_a: resolved.dropped_a.len(),
            dropped_b: resolved.dropped_b.len(),
        },
        manifest: None,
        randomized,
    })
}
