//! Corpus bias-measurement toolkit.
//!
//! The crate covers the full desk-scale analysis pipeline:
//!
//! * [`corpus`]: document ingestion, preprocessing, and region/period sharding
//! * [`embedding`]: vocabularies, distance-weighted co-occurrence counts, and
//!   GloVe-style embedding training with binary/text persistence
//! * [`weat`]: word-association scores, the association-test statistic, and
//!   its permutation randomization test
//! * [`crosscorpus`]: normalized cross-corpus statistics and the synthetic
//!   reference distribution used to judge differences between corpora
//! * [`synthgen`]: seeded synthetic corpora with controllable planted bias,
//!   used as a ground-truth oracle for the pipeline
//! * [`report`]: grid/table emission for the analysis artifacts
//! * [`manifest`]: run manifests with input/output digests
//!
//! All randomness flows from explicit seeds; every operation documents its
//! determinism contract.

pub mod corpus;
pub mod crosscorpus;
pub mod embedding;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod seeding;
pub mod synthgen;
pub mod weat;

pub use corpus::{CorpusShard, Document, PeriodScheme, PreprocessConfig, RegionMap};
pub use embedding::{CooccurrenceTable, EmbeddingSet, TrainConfig, Vocabulary};
pub use weat::{WeatConfig, WeatResult, WordSets};
