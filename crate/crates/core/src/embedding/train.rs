//! Weighted least-squares embedding training with adaptive-gradient SGD.
//!
//! The objective over nonzero co-occurrence entries (i, j, x) is
//!
//! ```text
//! J = 0.5 * sum f(x) * (w_i . w~_j + b_i + b~_j - ln x)^2
//! f(x) = (x / x_max)^exponent for x < x_max, else 1
//! ```
//!
//! Each pass visits the directed entries in a freshly shuffled order and
//! applies per-parameter adaptive-gradient updates (accumulators start at 1;
//! the accumulated quantity is the learning-rate-scaled gradient, matching
//! the reference recipe this implementation follows). Single-threaded runs
//! are bit-reproducible for a fixed seed. With `threads > 1` the pass is
//! split across unsynchronized workers whose updates may race benignly;
//! results are then only seed-approximate.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CooccurrenceTable, EmbeddingError, Vocabulary};
use crate::seeding;

/// Training hyperparameters. Defaults: 200 dimensions, 15 iterations,
/// min_count 10, window 20, x_max 100, exponent 0.75, learning rate 0.05.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dimension: usize,
    pub iterations: usize,
    pub min_count: u64,
    pub window: usize,
    pub x_max: f64,
    pub exponent: f64,
    pub learning_rate: f64,
    pub seed: u64,
    /// 1 = deterministic sequential mode (required for reproducible runs).
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dimension: 200,
            iterations: 15,
            min_count: 10,
            window: 20,
            x_max: 100.0,
            exponent: 0.75,
            learning_rate: 0.05,
            seed: 0,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let bad = |m: &str| Err(EmbeddingError::InvalidConfig(m.into()));
        if self.dimension < 1 {
            return bad("dimension must be >= 1");
        }
        if self.iterations < 1 {
            return bad("iterations must be >= 1");
        }
        if self.min_count < 1 {
            return bad("min_count must be >= 1");
        }
        if self.window < 1 {
            return bad("window must be >= 1");
        }
        if !self.x_max.is_finite() || self.x_max <= 0.0 {
            return bad("x_max must be > 0");
        }
        if !self.exponent.is_finite() || self.exponent <= 0.0 || self.exponent > 1.0 {
            return bad("exponent must be in (0, 1]");
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return bad("learning rate must be > 0");
        }
        if self.threads < 1 {
            return bad("threads must be >= 1");
        }
        Ok(())
    }
}

/// Flat parameter block: main and context vectors plus their bias terms.
/// Also serves as the gradient container for the objective check.
#[derive(Debug, Clone)]
pub struct GloveModel {
    pub vocab_size: usize,
    pub dim: usize,
    pub main: Vec<f64>,
    pub main_bias: Vec<f64>,
    pub context: Vec<f64>,
    pub context_bias: Vec<f64>,
}

impl GloveModel {
    /// Seeded initialization: every component (biases included) uniform in
    /// (-0.5/dim, +0.5/dim). Draw order is fixed: per word, main components
    /// then main bias; then per word, context components then context bias.
    pub fn init(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = move |rng: &mut ChaCha8Rng| (rng.random::<f64>() - 0.5) / dim as f64;
        let mut main = Vec::with_capacity(vocab_size * dim);
        let mut main_bias = Vec::with_capacity(vocab_size);
        for _ in 0..vocab_size {
            for _ in 0..dim {
                main.push(draw(&mut rng));
            }
            main_bias.push(draw(&mut rng));
        }
        let mut context = Vec::with_capacity(vocab_size * dim);
        let mut context_bias = Vec::with_capacity(vocab_size);
        for _ in 0..vocab_size {
            for _ in 0..dim {
                context.push(draw(&mut rng));
            }
            context_bias.push(draw(&mut rng));
        }
        GloveModel {
            vocab_size,
            dim,
            main,
            main_bias,
            context,
            context_bias,
        }
    }

    fn zeros(vocab_size: usize, dim: usize) -> Self {
        GloveModel {
            vocab_size,
            dim,
            main: vec![0.0; vocab_size * dim],
            main_bias: vec![0.0; vocab_size],
            context: vec![0.0; vocab_size * dim],
            context_bias: vec![0.0; vocab_size],
        }
    }

    fn ones(vocab_size: usize, dim: usize) -> Self {
        GloveModel {
            vocab_size,
            dim,
            main: vec![1.0; vocab_size * dim],
            main_bias: vec![1.0; vocab_size],
            context: vec![1.0; vocab_size * dim],
            context_bias: vec![1.0; vocab_size],
        }
    }

    /// Weighting function f(x).
    pub fn weight(x: f64, x_max: f64, exponent: f64) -> f64 {
        if x < x_max {
            (x / x_max).powf(exponent)
        } else {
            1.0
        }
    }

    fn residual(&self, i: usize, j: usize, x: f64) -> f64 {
        let d = self.dim;
        let mut dot = 0.0;
        for k in 0..d {
            dot += self.main[i * d + k] * self.context[j * d + k];
        }
        dot + self.main_bias[i] + self.context_bias[j] - x.ln()
    }

    /// Objective value over the given directed entries.
    pub fn cost(&self, entries: &[(u32, u32, f64)], x_max: f64, exponent: f64) -> f64 {
        entries
            .iter()
            .map(|&(i, j, x)| {
                let diff = self.residual(i as usize, j as usize, x);
                0.5 * Self::weight(x, x_max, exponent) * diff * diff
            })
            .sum()
    }

    /// Analytic gradient of [`cost`](Self::cost) with respect to every
    /// parameter, returned in a same-shape model.
    pub fn cost_gradient(
        &self,
        entries: &[(u32, u32, f64)],
        x_max: f64,
        exponent: f64,
    ) -> GloveModel {
        let d = self.dim;
        let mut grad = GloveModel::zeros(self.vocab_size, d);
        for &(i, j, x) in entries {
            let (i, j) = (i as usize, j as usize);
            let diff = self.residual(i, j, x);
            let g = Self::weight(x, x_max, exponent) * diff;
            for k in 0..d {
                grad.main[i * d + k] += g * self.context[j * d + k];
                grad.context[j * d + k] += g * self.main[i * d + k];
            }
            grad.main_bias[i] += g;
            grad.context_bias[j] += g;
        }
        grad
    }
}

/// Metadata recorded with a trained embedding set.
#[derive(Debug, Clone)]
pub struct TrainMeta {
    pub iterations: usize,
    pub final_loss: f64,
    /// Mean per-entry objective after each iteration.
    pub loss_history: Vec<f64>,
    pub seed: u64,
    /// Which vectors [`EmbeddingSet::vector`] serves; always the element-wise
    /// sum of main and context vectors for trained sets.
    pub vector_source: String,
}

/// Vocabulary plus per-term vectors. Trained sets carry main, context, and
/// combined (= main + context) vectors; sets loaded from disk carry only
/// combined vectors.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    vocab: Vocabulary,
    dim: usize,
    main: Option<Vec<f64>>,
    context: Option<Vec<f64>>,
    combined: Vec<f64>,
    pub meta: Option<TrainMeta>,
}

impl EmbeddingSet {
    /// Build a set from combined vectors only (the on-disk representation).
    pub fn from_combined(
        vocab: Vocabulary,
        dim: usize,
        combined: Vec<f64>,
    ) -> Result<Self, EmbeddingError> {
        if combined.len() != vocab.len() * dim {
            return Err(EmbeddingError::InvalidConfig(format!(
                "expected {} components for {} terms x {} dims, got {}",
                vocab.len() * dim,
                vocab.len(),
                dim,
                combined.len()
            )));
        }
        if let Some(pos) = combined.iter().position(|v| !v.is_finite()) {
            return Err(EmbeddingError::NonFiniteVector {
                term: vocab.term((pos / dim.max(1)) as u32).to_string(),
            });
        }
        Ok(EmbeddingSet {
            vocab,
            dim,
            main: None,
            context: None,
            combined,
            meta: None,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    /// The output vector for `term`, if it is in the vocabulary.
    pub fn vector(&self, term: &str) -> Option<&[f64]> {
        self.vocab.id(term).map(|id| self.vector_by_id(id))
    }

    pub fn vector_by_id(&self, id: u32) -> &[f64] {
        let i = id as usize * self.dim;
        &self.combined[i..i + self.dim]
    }

    pub fn main_vector(&self, id: u32) -> Option<&[f64]> {
        let i = id as usize * self.dim;
        self.main.as_ref().map(|m| &m[i..i + self.dim])
    }

    pub fn context_vector(&self, id: u32) -> Option<&[f64]> {
        let i = id as usize * self.dim;
        self.context.as_ref().map(|c| &c[i..i + self.dim])
    }

    /// Copy with every vector multiplied by `factor`; used by the scale
    /// invariance checks.
    pub fn scaled(&self, factor: f64) -> EmbeddingSet {
        EmbeddingSet {
            vocab: self.vocab.clone(),
            dim: self.dim,
            main: self
                .main
                .as_ref()
                .map(|m| m.iter().map(|v| v * factor).collect()),
            context: self
                .context
                .as_ref()
                .map(|c| c.iter().map(|v| v * factor).collect()),
            combined: self.combined.iter().map(|v| v * factor).collect(),
            meta: self.meta.clone(),
        }
    }
}

/// Outcome of one pass over the entries: summed objective, or the index of
/// the entry where the objective left the finite range.
enum PassOutcome {
    Cost(f64),
    NonFinite(usize),
}

fn sequential_pass(
    model: &mut GloveModel,
    grads: &mut GloveModel,
    entries: &[(u32, u32, f64)],
    cfg: &TrainConfig,
) -> PassOutcome {
    let d = model.dim;
    let mut upd_main = vec![0.0; d];
    let mut upd_ctx = vec![0.0; d];
    let mut cost_sum = 0.0;
    for (idx, &(i, j, x)) in entries.iter().enumerate() {
        let (i, j) = (i as usize, j as usize);
        let diff = model.residual(i, j, x);
        let fw = GloveModel::weight(x, cfg.x_max, cfg.exponent);
        let cost = 0.5 * fw * diff * diff;
        if !cost.is_finite() {
            return PassOutcome::NonFinite(idx);
        }
        cost_sum += cost;
        let upd = cfg.learning_rate * fw * diff;
        for k in 0..d {
            let t_main = upd * model.context[j * d + k];
            let t_ctx = upd * model.main[i * d + k];
            upd_main[k] = t_main / grads.main[i * d + k].sqrt();
            upd_ctx[k] = t_ctx / grads.context[j * d + k].sqrt();
            grads.main[i * d + k] += t_main * t_main;
            grads.context[j * d + k] += t_ctx * t_ctx;
        }
        for k in 0..d {
            model.main[i * d + k] -= upd_main[k];
            model.context[j * d + k] -= upd_ctx[k];
        }
        model.main_bias[i] -= upd / grads.main_bias[i].sqrt();
        grads.main_bias[i] += upd * upd;
        model.context_bias[j] -= upd / grads.context_bias[j].sqrt();
        grads.context_bias[j] += upd * upd;
    }
    PassOutcome::Cost(cost_sum)
}

/// Shared-parameter view for the racy parallel mode. Every access goes
/// through relaxed atomic loads/stores of the f64 bit pattern, so concurrent
/// unsynchronized updates stay well-defined; lost updates are accepted.
mod hogwild {
    use std::sync::atomic::{AtomicU64, Ordering};

    pub struct AtomicParams(Vec<AtomicU64>);

    impl AtomicParams {
        pub fn from_f64(values: &[f64]) -> Self {
            AtomicParams(values.iter().map(|v| AtomicU64::new(v.to_bits())).collect())
        }

        pub fn to_f64(&self) -> Vec<f64> {
            self.0
                .iter()
                .map(|a| f64::from_bits(a.load(Ordering::Relaxed)))
                .collect()
        }

        #[inline]
        pub fn get(&self, i: usize) -> f64 {
            f64::from_bits(self.0[i].load(Ordering::Relaxed))
        }

        #[inline]
        pub fn set(&self, i: usize, v: f64) {
            self.0[i].store(v.to_bits(), Ordering::Relaxed);
        }

        #[inline]
        pub fn add(&self, i: usize, delta: f64) {
            self.set(i, self.get(i) + delta);
        }
    }
}

struct SharedModel {
    dim: usize,
    main: hogwild::AtomicParams,
    main_bias: hogwild::AtomicParams,
    context: hogwild::AtomicParams,
    context_bias: hogwild::AtomicParams,
    g_main: hogwild::AtomicParams,
    g_main_bias: hogwild::AtomicParams,
    g_context: hogwild::AtomicParams,
    g_context_bias: hogwild::AtomicParams,
}

impl SharedModel {
    fn new(model: &GloveModel, grads: &GloveModel) -> Self {
        SharedModel {
            dim: model.dim,
            main: hogwild::AtomicParams::from_f64(&model.main),
            main_bias: hogwild::AtomicParams::from_f64(&model.main_bias),
            context: hogwild::AtomicParams::from_f64(&model.context),
            context_bias: hogwild::AtomicParams::from_f64(&model.context_bias),
            g_main: hogwild::AtomicParams::from_f64(&grads.main),
            g_main_bias: hogwild::AtomicParams::from_f64(&grads.main_bias),
            g_context: hogwild::AtomicParams::from_f64(&grads.context),
            g_context_bias: hogwild::AtomicParams::from_f64(&grads.context_bias),
        }
    }

    fn write_back(&self, model: &mut GloveModel, grads: &mut GloveModel) {
        model.main = self.main.to_f64();
        model.main_bias = self.main_bias.to_f64();
        model.context = self.context.to_f64();
        model.context_bias = self.context_bias.to_f64();
        grads.main = self.g_main.to_f64();
        grads.main_bias = self.g_main_bias.to_f64();
        grads.context = self.g_context.to_f64();
        grads.context_bias = self.g_context_bias.to_f64();
    }

    fn step(&self, i: usize, j: usize, x: f64, cfg: &TrainConfig) -> Option<f64> {
        let d = self.dim;
        let mut dot = 0.0;
        for k in 0..d {
            dot += self.main.get(i * d + k) * self.context.get(j * d + k);
        }
        let diff = dot + self.main_bias.get(i) + self.context_bias.get(j) - x.ln();
        let fw = GloveModel::weight(x, cfg.x_max, cfg.exponent);
        let cost = 0.5 * fw * diff * diff;
        if !cost.is_finite() {
            return None;
        }
        let upd = cfg.learning_rate * fw * diff;
        for k in 0..d {
            let old_main = self.main.get(i * d + k);
            let old_ctx = self.context.get(j * d + k);
            let t_main = upd * old_ctx;
            let t_ctx = upd * old_main;
            self.main
                .set(i * d + k, old_main - t_main / self.g_main.get(i * d + k).sqrt());
            self.context.set(
                j * d + k,
                old_ctx - t_ctx / self.g_context.get(j * d + k).sqrt(),
            );
            self.g_main.add(i * d + k, t_main * t_main);
            self.g_context.add(j * d + k, t_ctx * t_ctx);
        }
        self.main_bias
            .set(i, self.main_bias.get(i) - upd / self.g_main_bias.get(i).sqrt());
        self.g_main_bias.add(i, upd * upd);
        self.context_bias.set(
            j,
            self.context_bias.get(j) - upd / self.g_context_bias.get(j).sqrt(),
        );
        self.g_context_bias.add(j, upd * upd);
        Some(cost)
    }
}

fn parallel_pass(
    shared: &SharedModel,
    entries: &[(u32, u32, f64)],
    cfg: &TrainConfig,
) -> PassOutcome {
    let chunk = entries.len().div_ceil(cfg.threads);
    let outcomes: Vec<PassOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = entries
            .chunks(chunk.max(1))
            .enumerate()
            .map(|(c, slice)| {
                scope.spawn(move || {
                    let mut cost_sum = 0.0;
                    for (idx, &(i, j, x)) in slice.iter().enumerate() {
                        match shared.step(i as usize, j as usize, x, cfg) {
                            Some(cost) => cost_sum += cost,
                            None => return PassOutcome::NonFinite(c * chunk + idx),
                        }
                    }
                    PassOutcome::Cost(cost_sum)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut total = 0.0;
    for outcome in outcomes {
        match outcome {
            PassOutcome::Cost(c) => total += c,
            PassOutcome::NonFinite(idx) => return PassOutcome::NonFinite(idx),
        }
    }
    PassOutcome::Cost(total)
}

/// Train embeddings over the table's nonzero entries.
///
/// Runs exactly `cfg.iterations` shuffled adaptive-gradient passes (no early
/// stopping); a non-finite objective aborts with the offending entry named.
/// The returned set's output vectors are main + context sums.
pub fn train(
    table: &CooccurrenceTable,
    vocab: &Vocabulary,
    cfg: &TrainConfig,
) -> Result<EmbeddingSet, EmbeddingError> {
    cfg.validate()?;
    if table.is_empty() {
        return Err(EmbeddingError::EmptyTable);
    }
    if vocab.len() != table.vocab_size() {
        return Err(EmbeddingError::VocabMismatch {
            expected: table.vocab_size(),
            got: vocab.len(),
        });
    }

    let dim = cfg.dimension;
    let mut model = GloveModel::init(vocab.len(), dim, cfg.seed);
    let mut grads = GloveModel::ones(vocab.len(), dim);
    let mut entries = table.directed_entries();
    let mut shuffle_rng = seeding::stream_rng(cfg.seed, 1);

    let non_finite = |iteration: usize, entry: (u32, u32, f64)| EmbeddingError::NonFiniteLoss {
        iteration,
        term_i: vocab.term(entry.0).to_string(),
        term_j: vocab.term(entry.1).to_string(),
    };

    let mut history = Vec::with_capacity(cfg.iterations);
    if cfg.threads <= 1 {
        for iteration in 0..cfg.iterations {
            entries.shuffle(&mut shuffle_rng);
            match sequential_pass(&mut model, &mut grads, &entries, cfg) {
                PassOutcome::Cost(sum) => history.push(sum / entries.len() as f64),
                PassOutcome::NonFinite(idx) => return Err(non_finite(iteration, entries[idx])),
            }
        }
    } else {
        let shared = SharedModel::new(&model, &grads);
        for iteration in 0..cfg.iterations {
            entries.shuffle(&mut shuffle_rng);
            match parallel_pass(&shared, &entries, cfg) {
                PassOutcome::Cost(sum) => history.push(sum / entries.len() as f64),
                PassOutcome::NonFinite(idx) => return Err(non_finite(iteration, entries[idx])),
            }
        }
        shared.write_back(&mut model, &mut grads);
    }

    let combined: Vec<f64> = model
        .main
        .iter()
        .zip(model.context.iter())
        .map(|(m, c)| m + c)
        .collect();
    if let Some(pos) = combined.iter().position(|v| !v.is_finite()) {
        return Err(EmbeddingError::NonFiniteVector {
            term: vocab.term((pos / dim) as u32).to_string(),
        });
    }
    let final_loss = *history.last().expect("at least one iteration");
    Ok(EmbeddingSet {
        vocab: vocab.clone(),
        dim,
        main: Some(model.main),
        context: Some(model.context),
        combined,
        meta: Some(TrainMeta {
            iterations: cfg.iterations,
            final_loss,
            loss_history: history,
            seed: cfg.seed,
            vector_source: "main+context".into(),
        }),
    })
}
