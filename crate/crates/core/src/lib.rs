//! Two-agent lexicon bootstrapping: cross-situational and supervised learning
//! dynamics on integer-count verbalization matrices, post-freeze
//! communication measures, and random-assignment (occupancy) baselines.

pub mod error;
pub mod experiment;
pub mod game;
pub mod lexicon;
pub mod measures;
pub mod occupancy;

pub use error::{Error, Result};
pub use experiment::{
    derive_seed, extrapolate_to_infinite_n, mean_and_standard_error, run_ensemble,
    run_ensemble_outcomes, sweep_alpha, words_for_alpha, EnsembleStats, FitResult, SampleOutcome,
    SizePoint, SweepRow,
};
pub use game::{run_game, Agent, GameConfig, GameResult, LearningMode, DEFAULT_MAX_EPISODES};
pub use lexicon::{ObjectId, VerbalizationMatrix, WordId};
pub use measures::{
    accuracy_report, consensus_distance, game_report, optimal_error, CommunicationReport, GameReport,
};
pub use occupancy::{
    asymptotic_error, exact_expected_error, exact_unused_distribution, poisson_limit,
    random_assignment_sample, OccupancyDistribution, PoissonLimit,
};
