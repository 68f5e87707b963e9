//! Seeded experiments: configuration, training runs, learning-curve CSVs,
//! summaries and greedy evaluation of saved models.

mod config;
mod evaluate;
mod run;
mod stats;

pub use config::ExperimentConfig;
pub use evaluate::{evaluate, evaluate_file, Evaluation};
pub use run::{
    csv_path, episode_seed, model_path, new_agent, read_csv_returns, run_episode, run_experiment, run_seed,
    Experiment, RunRecord, SeedOutcome, SeedSummary, Summary, CSV_HEADER,
};
pub use stats::{describe, median, Stats};
