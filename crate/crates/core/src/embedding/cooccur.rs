//! Sparse symmetric distance-weighted co-occurrence accumulation.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{EmbeddingError, Vocabulary};
use crate::corpus::CorpusShard;

/// Documents per parallel counting chunk. Chunk boundaries are fixed so the
/// sequential merge order (and therefore float rounding) is identical for
/// any thread count.
const CHUNK_DOCS: usize = 512;

/// Sparse symmetric co-occurrence table over a vocabulary.
///
/// `entry(i, j)` is the total inverse-distance weight with which term `i`
/// was observed in the window of term `j`; by construction it equals
/// `entry(j, i)`. Storage is canonical (one cell per unordered pair); the
/// diagonal cell carries both directed contributions of each token pair.
#[derive(Debug, Clone)]
pub struct CooccurrenceTable {
    pairs: HashMap<(u32, u32), f64>,
    window: usize,
    vocab_size: usize,
}

impl CooccurrenceTable {
    pub fn new(vocab_size: usize, window: usize) -> Self {
        CooccurrenceTable {
            pairs: HashMap::new(),
            window,
            vocab_size,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Record one unordered co-occurrence of `i` and `j` with weight `w`:
    /// both `entry(i, j)` and `entry(j, i)` grow by `w`.
    pub fn add_pair(&mut self, i: u32, j: u32, w: f64) {
        let key = (i.min(j), i.max(j));
        // A pair of equal terms feeds the single diagonal cell from both
        // directions.
        let increment = if i == j { 2.0 * w } else { w };
        *self.pairs.entry(key).or_insert(0.0) += increment;
    }

    pub fn entry(&self, i: u32, j: u32) -> f64 {
        self.pairs
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Number of stored canonical cells.
    pub fn nonzero_len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Canonical cells sorted by key; deterministic.
    pub fn canonical_entries(&self) -> Vec<(u32, u32, f64)> {
        let mut entries: Vec<(u32, u32, f64)> =
            self.pairs.iter().map(|(&(i, j), &v)| (i, j, v)).collect();
        entries.sort_by_key(|&(i, j, _)| (i, j));
        entries
    }

    /// The full symmetric relation as directed entries, sorted: off-diagonal
    /// cells appear once per direction, diagonal cells once. This is the
    /// training stream, and its weight sum equals the total over ordered
    /// in-window token pairs of 1/distance.
    pub fn directed_entries(&self) -> Vec<(u32, u32, f64)> {
        let mut entries = Vec::with_capacity(2 * self.pairs.len());
        for (i, j, v) in self.canonical_entries() {
            entries.push((i, j, v));
            if i != j {
                entries.push((j, i, v));
            }
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        entries
    }

    /// Total weight over the directed entries.
    pub fn total_weight(&self) -> f64 {
        self.pairs
            .iter()
            .map(|(&(i, j), &v)| if i == j { v } else { 2.0 * v })
            .sum()
    }

    fn merge_from(&mut self, other: HashMap<(u32, u32), f64>) {
        let mut cells: Vec<((u32, u32), f64)> = other.into_iter().collect();
        cells.sort_by_key(|&(k, _)| k);
        for (key, v) in cells {
            *self.pairs.entry(key).or_insert(0.0) += v;
        }
    }
}

fn count_document(tokens: &[String], vocab: &Vocabulary, window: usize) -> Vec<(u32, u32, f64)> {
    let ids: Vec<Option<u32>> = tokens.iter().map(|t| vocab.id(t)).collect();
    let mut out = Vec::new();
    for i in 0..ids.len() {
        let Some(a) = ids[i] else { continue };
        let hi = (i + window).min(ids.len().saturating_sub(1));
        for (offset, id) in ids[i + 1..=hi].iter().enumerate() {
            let Some(b) = *id else { continue };
            out.push((a, b, 1.0 / (offset + 1) as f64));
        }
    }
    out
}

/// Scan each document with a symmetric window of `window` tokens, adding
/// weight 1/distance for every in-vocabulary pair. Windows never cross
/// document boundaries. Counting runs in parallel over fixed-size document
/// chunks with an ordered merge, so the result is bit-identical for any
/// thread count.
pub fn count_cooccurrences(
    shard: &CorpusShard,
    vocab: &Vocabulary,
    window: usize,
) -> Result<CooccurrenceTable, EmbeddingError> {
    if vocab.is_empty() {
        return Err(EmbeddingError::EmptyVocabulary);
    }
    if window == 0 {
        return Err(EmbeddingError::InvalidConfig("window must be >= 1".into()));
    }
    let mut table = CooccurrenceTable::new(vocab.len(), window);
    let partials: Vec<HashMap<(u32, u32), f64>> = shard
        .documents
        .par_chunks(CHUNK_DOCS)
        .map(|docs| {
            let mut partial: HashMap<(u32, u32), f64> = HashMap::new();
            for doc in docs {
                for (a, b, w) in count_document(&doc.tokens, vocab, window) {
                    let key = (a.min(b), a.max(b));
                    let increment = if a == b { 2.0 * w } else { w };
                    *partial.entry(key).or_insert(0.0) += increment;
                }
            }
            partial
        })
        .collect();
    for partial in partials {
        table.merge_from(partial);
    }
    Ok(table)
}
