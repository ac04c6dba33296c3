//! Shard → vocabulary → co-occurrence → training → randomization test, as
//! one composable pipeline, plus the full reference-distribution run.

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{CorpusShard, CorpusError};
use crate::crosscorpus::{
    generate_reference_corpora, reference_distribution, CrossCorpusError, CrossCorpusReport,
    SyntheticCorpusSpec,
};
use crate::embedding::{
    build_vocab, count_cooccurrences, train, EmbeddingError, EmbeddingSet, TrainConfig,
};
use crate::seeding;
use crate::weat::{randomization_test, WeatConfig, WeatError, WeatResult, WordSets};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Weat(#[from] WeatError),
    #[error(transparent)]
    CrossCorpus(#[from] CrossCorpusError),
}

/// Build the vocabulary, count co-occurrences, and train embeddings for one
/// shard using `cfg.min_count` and `cfg.window`.
pub fn train_shard(shard: &CorpusShard, cfg: &TrainConfig) -> Result<EmbeddingSet, PipelineError> {
    let vocab = build_vocab(shard, cfg.min_count);
    if vocab.is_empty() {
        return Err(EmbeddingError::EmptyVocabulary.into());
    }
    let table = count_cooccurrences(shard, &vocab, cfg.window)?;
    Ok(train(&table, &vocab, cfg)?)
}

/// Full single-corpus pipeline: train embeddings on the shard and run the
/// randomization test against `sets`. The result carries the shard name.
pub fn shard_weat(
    shard: &CorpusShard,
    sets: &WordSets,
    train_cfg: &TrainConfig,
    weat_cfg: &WeatConfig,
) -> Result<WeatResult, PipelineError> {
    let embeddings = train_shard(shard, train_cfg)?;
    let mut result = randomization_test(sets, &embeddings, weat_cfg)?;
    result.corpus = shard.name.clone();
    Ok(result)
}

/// Generate K synthetic corpora from the sources, train each, and assemble
/// the cross-corpus reference distribution.
///
/// Per-corpus training seeds derive from the corpus name; corpora whose
/// training fails are excluded with a warning (the report then carries
/// fewer reference corpora).
pub fn make_reference(
    sources: &[CorpusShard],
    spec: &SyntheticCorpusSpec,
    sets: &WordSets,
    train_cfg: &TrainConfig,
    weat_cfg: &WeatConfig,
) -> Result<CrossCorpusReport, PipelineError> {
    let corpora = generate_reference_corpora(sources, spec)?;
    let trained: Vec<(String, Result<EmbeddingSet, PipelineError>)> = corpora
        .par_iter()
        .map(|shard| {
            let cfg = TrainConfig {
                seed: seeding::derive_labeled(train_cfg.seed, &shard.name),
                ..train_cfg.clone()
            };
            (shard.name.clone(), train_shard(shard, &cfg))
        })
        .collect();
    let mut embeddings = Vec::with_capacity(trained.len());
    for (name, outcome) in trained {
        match outcome {
            Ok(set) => embeddings.push((name, set)),
            Err(e) => log::warn!("excluding corpus {name:?}: training failed: {e}"),
        }
    }
    Ok(reference_distribution(&embeddings, sets, weat_cfg)?)
}
