//! Monte Carlo ensembles of independent games, alpha sweeps and the
//! extrapolation of the error to infinite size.
//!
//! Every sample `i` of an ensemble is a game seeded with
//! `derive_seed(master_seed, i)`. Outcomes are gathered in index order and
//! reduced sequentially, so the statistics do not depend on the worker count.

mod fit;
mod stats;

pub use fit::{extrapolate_to_infinite_n, FitResult, SizePoint};
pub use stats::{derive_seed, mean_and_standard_error, CompensatedSum};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{run_game, GameConfig};
use crate::measures::game_report;
use crate::occupancy::asymptotic_error;

/// What one game of an ensemble produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub index: u64,
    pub seed: u64,
    pub episodes: u64,
    pub frozen: bool,
    pub consensus: bool,
    /// Agent I's error; `None` when the game did not freeze.
    pub error: Option<f64>,
    pub error_j: Option<f64>,
    pub consensus_distance: f64,
}

pub fn run_sample(config: &GameConfig, master_seed: u64, index: u64) -> Result<SampleOutcome> {
    let seed = derive_seed(master_seed, index);
    let cfg = GameConfig {
        seed,
        ..config.clone()
    };
    let result = run_game(&cfg)?;
    let (error, error_j, consensus_distance) = if result.frozen {
        let report = game_report(&result)?;
        (
            Some(report.agent_i.error_f64()),
            Some(report.agent_j.error_f64()),
            report.consensus_distance,
        )
    } else {
        let d = crate::measures::consensus_distance(&result.matrix_i, &result.matrix_j)?;
        (None, None, d)
    };
    Ok(SampleOutcome {
        index,
        seed,
        episodes: result.episodes,
        frozen: result.frozen,
        consensus: result.consensus,
        error,
        error_j,
        consensus_distance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    /// The shared configuration; its `seed` field is unused.
    pub config: GameConfig,
    pub n_samples: u64,
    pub n_frozen: u64,
    /// Mean of agent I's error over frozen games (NaN if none froze).
    pub mean_error: f64,
    pub std_error: f64,
    pub freeze_rate: f64,
    /// Fraction of frozen games that ended in lexicon consensus.
    pub consensus_rate: f64,
    pub mean_episodes: f64,
}

impl EnsembleStats {
    /// Aggregates outcomes in the order given.
    pub fn from_outcomes(config: &GameConfig, outcomes: &[SampleOutcome]) -> Self {
        let errors: Vec<f64> = outcomes.iter().filter_map(|o| o.error).collect();
        let n = outcomes.len() as u64;
        let n_frozen = errors.len() as u64;
        let (mean_error, std_error) = mean_and_standard_error(&errors).unwrap_or((f64::NAN, 0.0));
        let consensus = outcomes.iter().filter(|o| o.frozen && o.consensus).count() as f64;
        let episodes = outcomes
            .iter()
            .map(|o| o.episodes as f64)
            .collect::<CompensatedSum>()
            .value();
        let rate = |k: f64, of: u64| if of == 0 { 0.0 } else { k / of as f64 };
        EnsembleStats {
            config: config.clone(),
            n_samples: n,
            n_frozen,
            mean_error,
            std_error,
            freeze_rate: rate(n_frozen as f64, n),
            consensus_rate: rate(consensus, n_frozen),
            mean_episodes: rate(episodes, n),
        }
    }

    /// False when no game froze, so no error could be measured.
    pub fn is_valid(&self) -> bool {
        self.n_frozen > 0
    }
}

/// Runs `n_samples` independent games on up to `workers` threads and returns
/// every outcome in index order.
pub fn run_ensemble_outcomes(
    config: &GameConfig,
    n_samples: u64,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<SampleOutcome>> {
    config.validate()?;
    if n_samples == 0 {
        return Err(Error::config("n_samples must be at least 1"));
    }
    if workers == 0 {
        return Err(Error::config("workers must be at least 1"));
    }
    if workers == 1 {
        return (0..n_samples)
            .map(|i| run_sample(config, master_seed, i))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..n_samples)
            .into_par_iter()
            .map(|i| run_sample(config, master_seed, i))
            .collect()
    })
}

pub fn run_ensemble(
    config: &GameConfig,
    n_samples: u64,
    master_seed: u64,
    workers: usize,
) -> Result<EnsembleStats> {
    let outcomes = run_ensemble_outcomes(config, n_samples, master_seed, workers)?;
    Ok(EnsembleStats::from_outcomes(config, &outcomes))
}

/// Number of words for ratio `alpha` at `n_objects` objects: `round(alpha N)`.
pub fn words_for_alpha(alpha: f64, n_objects: usize) -> Result<usize> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::config(format!("alpha must be positive, got {alpha}")));
    }
    let h = (alpha * n_objects as f64).round();
    if h < 1.0 {
        return Err(Error::config(format!(
            "alpha {alpha} with N={n_objects} gives no words"
        )));
    }
    Ok(h as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub stats: EnsembleStats,
    /// Large-size random-assignment error at this alpha.
    pub eps_random: f64,
    /// Optimal (minimal) error at this alpha.
    pub eps_optimal: f64,
}

/// One ensemble per alpha, with `H = round(alpha N)` and everything else
/// taken from `base`.
pub fn sweep_alpha(
    base: &GameConfig,
    alphas: &[f64],
    n_samples: u64,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<SweepRow>> {
    let configs = alphas
        .iter()
        .map(|&alpha| {
            let n_words = words_for_alpha(alpha, base.n_objects)?;
            Ok(GameConfig {
                n_words,
                ..base.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    alphas
        .iter()
        .zip(configs)
        .map(|(&alpha, config)| {
            Ok(SweepRow {
                alpha,
                stats: run_ensemble(&config, n_samples, master_seed, workers)?,
                eps_random: asymptotic_error(alpha)?,
                eps_optimal: crate::measures::optimal_error(alpha)?,
            })
        })
        .collect()
}
