//! Vocabularies, distance-weighted co-occurrence counts, and embedding
//! training with persistence.

mod cooccur;
mod io;
mod train;

use std::collections::HashMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::CorpusShard;

pub use cooccur::{count_cooccurrences, CooccurrenceTable};
pub use io::{load_binary, load_text, save_binary, save_text, FORMAT_MAGIC, FORMAT_VERSION};
pub use train::{train, EmbeddingSet, GloveModel, TrainConfig, TrainMeta};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("co-occurrence table is empty")]
    EmptyTable,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("vocabulary size {got} does not match table ({expected})")]
    VocabMismatch { expected: usize, got: usize },
    #[error("non-finite loss at iteration {iteration} on entry ({term_i}, {term_j})")]
    NonFiniteLoss {
        iteration: usize,
        term_i: String,
        term_j: String,
    },
    #[error("non-finite vector for term {term:?}")]
    NonFiniteVector { term: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not an embedding file (bad magic at byte 0)")]
    BadMagic { path: PathBuf },
    #[error("{path}: unsupported format version {version}")]
    UnsupportedVersion { path: PathBuf, version: u32 },
    #[error("{path}: truncated file at byte {offset}")]
    Truncated { path: PathBuf, offset: u64 },
    #[error("{path}: term at byte {offset} is not valid UTF-8")]
    InvalidUtf8 { path: PathBuf, offset: u64 },
    #[error("{path}:{line}: {message}")]
    TextParse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: expected {expected} components, found {got}")]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("duplicate term {term:?}")]
    DuplicateTerm { term: String },
}

/// Term inventory with dense ids, ordered by descending corpus frequency
/// (ties lexicographic ascending).
#[derive(Debug, Clone)]
pub struct Vocabulary {
    terms: Vec<(String, u64)>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Terms of `shard` occurring at least `min_count` times.
    pub fn build(shard: &CorpusShard, min_count: u64) -> Vocabulary {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for doc in &shard.documents {
            for tok in &doc.tokens {
                *counts.entry(tok.as_str()).or_insert(0) += 1;
            }
        }
        let mut terms: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|(_, c)| *c >= min_count)
            .map(|(t, c)| (t.to_string(), c))
            .collect();
        terms.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Vocabulary::from_ordered_terms(terms).expect("counter produces unique terms")
    }

    /// Build from an already-ordered term list (used by the file loaders,
    /// which preserve file order).
    pub fn from_ordered_terms(terms: Vec<(String, u64)>) -> Result<Vocabulary, EmbeddingError> {
        let mut index = HashMap::with_capacity(terms.len());
        for (id, (term, _)) in terms.iter().enumerate() {
            if index.insert(term.clone(), id as u32).is_some() {
                return Err(EmbeddingError::DuplicateTerm { term: term.clone() });
            }
        }
        Ok(Vocabulary { terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize].0
    }

    pub fn frequency(&self, id: u32) -> u64 {
        self.terms[id as usize].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.terms.iter().map(|(t, c)| (t.as_str(), *c))
    }
}

/// Convenience for `Vocabulary::build`.
pub fn build_vocab(shard: &CorpusShard, min_count: u64) -> Vocabulary {
    Vocabulary::build(shard, min_count)
}
