//! Synthetic corpora with controllable planted association bias.
//!
//! Documents are background text drawn from a Zipf-distributed synthetic
//! vocabulary (exponent 1.1, so frequency structure roughly matches natural
//! language; uniform backgrounds degenerate the embedding objective). Each
//! document additionally carries one marker token and one attribute term.
//! With probability `beta` the pair is planted adjacently in the biased
//! pairing (X' markers next to B' terms, Y' markers next to A' terms); with
//! probability 1 − beta, marker and term are chosen and placed
//! independently and uniformly. At beta = 0 every placement is uniform, so
//! the corpus is a calibrated null for the association test.

use rand::Rng;
use rand_distr::{Distribution, Zipf};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{CorpusShard, Document};
use crate::embedding::TrainConfig;
use crate::pipeline::{shard_weat, PipelineError};
use crate::seeding;
use crate::weat::{WeatConfig, WeatError, WordSets};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid bias spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Weat(#[from] WeatError),
}

/// Zipf exponent for the background vocabulary.
const BACKGROUND_EXPONENT: f64 = 1.1;

/// Recipe for one synthetic corpus.
#[derive(Debug, Clone)]
pub struct BiasSpec {
    /// Marker sets standing in for the two target name sets.
    pub x_markers: Vec<String>,
    pub y_markers: Vec<String>,
    /// Attribute term sets.
    pub a_terms: Vec<String>,
    pub b_terms: Vec<String>,
    /// Planted-bias strength in [0, 1].
    pub beta: f64,
    /// Number of distinct background token types.
    pub background_vocab: usize,
    pub documents: usize,
    /// Inclusive document length bounds, in tokens.
    pub doc_len: (usize, usize),
    pub seed: u64,
}

/// `count` marker/term tokens named `<prefix>00`, `<prefix>01`, ...
pub fn token_set(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i:02}")).collect()
}

impl Default for BiasSpec {
    fn default() -> Self {
        BiasSpec {
            x_markers: token_set("xmark", 8),
            y_markers: token_set("ymark", 8),
            a_terms: token_set("aterm", 12),
            b_terms: token_set("bterm", 12),
            beta: 0.0,
            background_vocab: 2000,
            documents: 5000,
            doc_len: (20, 60),
            seed: 0,
        }
    }
}

impl BiasSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(SynthError::InvalidSpec(format!(
                "beta {} outside [0, 1]",
                self.beta
            )));
        }
        if self.documents < 1 {
            return Err(SynthError::InvalidSpec("documents must be >= 1".into()));
        }
        if self.background_vocab < 1 {
            return Err(SynthError::InvalidSpec(
                "background vocabulary must be >= 1".into(),
            ));
        }
        let (lo, hi) = self.doc_len;
        if lo < 2 || lo > hi {
            return Err(SynthError::InvalidSpec(format!(
                "document length range [{lo}, {hi}] must satisfy 2 <= min <= max"
            )));
        }
        // word-set validation covers non-emptiness and disjointness
        let sets = self.word_sets()?;
        for token in sets
            .x_targets
            .iter()
            .chain(&sets.y_targets)
            .chain(&sets.a_attributes)
            .chain(&sets.b_attributes)
        {
            if parse_background_index(token).is_some_and(|i| i < self.background_vocab) {
                return Err(SynthError::InvalidSpec(format!(
                    "token {token:?} collides with a background token"
                )));
            }
        }
        Ok(())
    }

    /// The word sets a test over this corpus should use: markers as
    /// targets, planted terms as attributes.
    pub fn word_sets(&self) -> Result<WordSets, SynthError> {
        Ok(WordSets::new(
            self.x_markers.clone(),
            self.y_markers.clone(),
            self.a_terms.clone(),
            self.b_terms.clone(),
        )?)
    }

    /// Spec with the marker sets exchanged; the expected statistic negates.
    pub fn swapped_markers(&self) -> BiasSpec {
        BiasSpec {
            x_markers: self.y_markers.clone(),
            y_markers: self.x_markers.clone(),
            ..self.clone()
        }
    }
}

fn background_token(rank: usize) -> String {
    format!("w{rank:05}")
}

fn parse_background_index(token: &str) -> Option<usize> {
    let digits = token.strip_prefix('w')?;
    if digits.len() == 5 && digits.bytes().all(|b| b.is_ascii_digit()) {
        digits.parse().ok()
    } else {
        None
    }
}

fn build_document(spec: &BiasSpec, index: usize) -> Document {
    let mut rng = seeding::stream_rng(spec.seed, index as u64);
    let zipf = Zipf::new(spec.background_vocab as f64, BACKGROUND_EXPONENT)
        .expect("validated background vocabulary");
    let len = rng.random_range(spec.doc_len.0..=spec.doc_len.1);
    let mut tokens: Vec<String> = (0..len)
        .map(|_| background_token(zipf.sample(&mut rng) as usize - 1))
        .collect();

    let marker_pool = spec.x_markers.len() + spec.y_markers.len();
    let marker_idx = rng.random_range(0..marker_pool);
    let (marker, is_x) = if marker_idx < spec.x_markers.len() {
        (&spec.x_markers[marker_idx], true)
    } else {
        (&spec.y_markers[marker_idx - spec.x_markers.len()], false)
    };

    let biased = rng.random::<f64>() < spec.beta;
    let (term, marker_pos, term_pos) = if biased {
        // the biased pairing: X' markers adjacent to B' terms, Y' to A'
        let term = if is_x {
            &spec.b_terms[rng.random_range(0..spec.b_terms.len())]
        } else {
            &spec.a_terms[rng.random_range(0..spec.a_terms.len())]
        };
        let marker_pos = rng.random_range(0..len);
        let term_pos = if marker_pos + 1 < len {
            marker_pos + 1
        } else {
            marker_pos - 1
        };
        (term, marker_pos, term_pos)
    } else {
        let attr_pool = spec.a_terms.len() + spec.b_terms.len();
        let attr_idx = rng.random_range(0..attr_pool);
        let term = if attr_idx < spec.a_terms.len() {
            &spec.a_terms[attr_idx]
        } else {
            &spec.b_terms[attr_idx - spec.a_terms.len()]
        };
        let marker_pos = rng.random_range(0..len);
        let term_pos = loop {
            let p = rng.random_range(0..len);
            if p != marker_pos {
                break p;
            }
        };
        (term, marker_pos, term_pos)
    };
    tokens[marker_pos] = marker.clone();
    tokens[term_pos] = term.clone();
    Document {
        id: format!("doc{index:07}"),
        tokens,
    }
}

/// Generate the corpus. Every document draws from a stream derived from
/// (seed, document index) and output order is fixed by index, so the shard
/// is byte-identical for any thread count.
pub fn generate(spec: &BiasSpec) -> Result<CorpusShard, SynthError> {
    spec.validate()?;
    let documents: Vec<Document> = (0..spec.documents)
        .into_par_iter()
        .map(|i| build_document(spec, i))
        .collect();
    Ok(CorpusShard {
        name: format!("synth-b{:.2}-s{}", spec.beta, spec.seed),
        documents,
    })
}

/// One row of a sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub documents: usize,
    pub seed: u64,
    pub observed: Option<f64>,
    pub normalized: Option<f64>,
    pub p_value: Option<f64>,
    /// "ok" or the failure rendered as text.
    pub status: String,
}

/// Run the full generate → train → test pipeline for every spec. Failures
/// become marked rows rather than aborting the sweep.
pub fn sweep(specs: &[BiasSpec], train_cfg: &TrainConfig, weat_cfg: &WeatConfig) -> Vec<SweepRow> {
    specs
        .par_iter()
        .map(|spec| {
            let row = |observed, normalized, p_value, status: String| SweepRow {
                beta: spec.beta,
                documents: spec.documents,
                seed: spec.seed,
                observed,
                normalized,
                p_value,
                status,
            };
            let outcome = (|| -> Result<crate::weat::WeatResult, String> {
                let shard = generate(spec).map_err(|e| e.to_string())?;
                let sets = spec.word_sets().map_err(|e| e.to_string())?;
                let per_spec_train = TrainConfig {
                    seed: seeding::derive_labeled(train_cfg.seed, &shard.name),
                    ..train_cfg.clone()
                };
                let per_spec_weat = WeatConfig {
                    seed: seeding::derive_labeled(weat_cfg.seed, &shard.name),
                    ..weat_cfg.clone()
                };
                shard_weat(&shard, &sets, &per_spec_train, &per_spec_weat)
                    .map_err(|e: PipelineError| e.to_string())
            })();
            match outcome {
                Ok(result) => row(
                    Some(result.observed),
                    result.normalized,
                    Some(result.p_value),
                    "ok".into(),
                ),
                Err(message) => row(None, None, None, message),
            }
        })
        .collect()
}

/// Render sweep rows as CSV.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("beta,documents,seed,observed,normalized_statistic,p_value,status\n");
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.beta,
            r.documents,
            r.seed,
            opt(r.observed),
            opt(r.normalized),
            opt(r.p_value),
            r.status.replace(',', ";"),
        ));
    }
    out
}
