use std::path::Path;

use crate::agent::{Agent, StateScaler};
use crate::envs::make;
use crate::error::{Error, Result};
use crate::gmm::{load_model, Mixture};
use crate::par::{self, Execution};

use super::run::{episode_seed, run_episode};
use super::stats::{describe, Stats};

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub returns: Vec<f64>,
    pub stats: Stats,
}

/// Runs the greedy policy of `model` for `episodes` episodes without any
/// learning. Episodes are independent, so `exec` does not change the result.
pub fn evaluate(model: &Mixture, env_name: &str, episodes: usize, seed: u64, exec: Execution) -> Result<Evaluation> {
    if episodes == 0 {
        return Err(Error::Config("at least one evaluation episode is required".into()));
    }
    let spec = make(env_name)?.spec().clone();
    let expected = spec.observation_dim() + spec.action_count;
    crate::error::check_dim(expected, model.dim())?;
    let scaler = StateScaler::from_spec(&spec)?;
    let results = par::map_range(exec, episodes, |i| {
        let mut env = make(env_name)?;
        let reset = episode_seed(seed, i as u64);
        let mut agent = Agent::greedy(model.clone(), scaler.clone(), spec.action_count, reset)?;
        run_episode(&mut agent, env.as_mut(), reset, false).map(|(ret, _)| ret)
    });
    let returns = results.into_iter().collect::<Result<Vec<_>>>()?;
    let stats = describe(&returns);
    Ok(Evaluation { returns, stats })
}

pub fn evaluate_file(path: &Path, env_name: &str, episodes: usize, seed: u64, exec: Execution) -> Result<Evaluation> {
    let model = load_model(path)?;
    evaluate(&model, env_name, episodes, seed, exec)
}
