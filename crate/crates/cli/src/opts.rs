//! Flag groups shared by the training and testing subcommands.

use anyhow::Result;
use corpusbias::embedding::TrainConfig;
use corpusbias::weat::{StatisticKind, WeatConfig};

use crate::config::FileConfig;

#[derive(Debug, clap::Args)]
pub struct TrainOpts {
    /// Vector dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Co-occurrence window in tokens.
    #[arg(long)]
    pub window: Option<usize>,
    /// Minimum corpus frequency for a vocabulary term.
    #[arg(long = "min-count")]
    pub min_count: Option<u64>,
    /// Training iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Weighting-function cutoff.
    #[arg(long = "x-max")]
    pub x_max: Option<f64>,
    /// Weighting-function exponent.
    #[arg(long)]
    pub exponent: Option<f64>,
    /// Initial adaptive-gradient learning rate.
    #[arg(long = "learning-rate")]
    pub learning_rate: Option<f64>,
}

impl TrainOpts {
    pub fn resolve(&self, cfg: &FileConfig, seed: u64, threads: usize) -> Result<TrainConfig> {
        let d = TrainConfig::default();
        Ok(TrainConfig {
            dimension: cfg.resolve(&self.dim, "dim", d.dimension)?,
            iterations: cfg.resolve(&self.iters, "iters", d.iterations)?,
            min_count: cfg.resolve(&self.min_count, "min-count", d.min_count)?,
            window: cfg.resolve(&self.window, "window", d.window)?,
            x_max: cfg.resolve(&self.x_max, "x-max", d.x_max)?,
            exponent: cfg.resolve(&self.exponent, "exponent", d.exponent)?,
            learning_rate: cfg.resolve(&self.learning_rate, "learning-rate", d.learning_rate)?,
            seed,
            threads,
        })
    }
}

#[derive(Debug, clap::Args)]
pub struct WeatOpts {
    /// Randomization-test shuffle count.
    #[arg(long)]
    pub shuffles: Option<usize>,
    /// Significance level.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Combine target associations by `sums` (reference form) or `means`.
    #[arg(long)]
    pub statistic: Option<StatisticKind>,
}

impl WeatOpts {
    pub fn resolve(&self, cfg: &FileConfig, seed: u64) -> Result<WeatConfig> {
        let d = WeatConfig::default();
        Ok(WeatConfig {
            shuffles: cfg.resolve(&self.shuffles, "shuffles", d.shuffles)?,
            alpha: cfg.resolve(&self.alpha, "alpha", d.alpha)?,
            seed,
            statistic: cfg.resolve(&self.statistic, "statistic", d.statistic)?,
        })
    }
}

/// Resolve the run seed: flag, else config `seed`, else 0.
pub fn resolve_seed(flag: Option<u64>, cfg: &FileConfig) -> Result<u64> {
    cfg.resolve(&flag, "seed", 0)
}
