use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::agent::{Agent, StateScaler, Transition};
use crate::envs::{make, solved, EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::gmm::{save_model, Mixture};
use crate::par::{self, Execution};

use super::config::ExperimentConfig;
use super::stats::{describe, median, Stats};

pub const CSV_HEADER: &str = "episode,return,steps,components,ms";

/// Seed for the environment reset of one episode.
pub fn episode_seed(seed: u64, episode: u64) -> u64 {
    // splitmix64 over a combination of both
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(episode)
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One row of a learning curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub episode: usize,
    pub ret: f64,
    pub steps: usize,
    pub components: usize,
    pub ms: u64,
}

/// Result of training one seed.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub records: Vec<RunRecord>,
    pub solved: Option<usize>,
    /// Episode after which learning was frozen by early stopping.
    pub frozen_at: Option<usize>,
    pub model: Mixture,
    /// Set when the run was cut short by a numerical failure.
    pub error: Option<String>,
}

impl SeedOutcome {
    pub fn returns(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ret).collect()
    }

    pub fn final_components(&self) -> usize {
        self.model.len()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(32 * (self.records.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            writeln!(s, "{},{},{},{},{}", r.episode, r.ret, r.steps, r.components, r.ms).unwrap();
        }
        s
    }
}

/// Runs one episode. When `learn` is false the agent only acts.
pub fn run_episode(agent: &mut Agent, env: &mut dyn Environment, reset_seed: u64, learn: bool) -> Result<(f64, usize)> {
    let mut state = env.reset(reset_seed);
    let mut total = 0.0;
    let mut steps = 0;
    loop {
        let action = if learn {
            agent.select_action(&state)?
        } else {
            agent.greedy_action(&state)?
        };
        let r = env.step(action)?;
        total += r.reward;
        steps += 1;
        let done = r.done();
        if learn {
            agent.observe(Transition {
                state,
                action,
                reward: r.reward,
                next_state: r.observation.clone(),
                terminal: r.terminated,
            })?;
        }
        state = r.observation;
        if done {
            return Ok((total, steps));
        }
    }
}

/// Builds a fresh agent for `seed` from the experiment settings.
pub fn new_agent(cfg: &ExperimentConfig, spec: &EnvSpec, seed: u64) -> Result<Agent> {
    Agent::new(
        cfg.agent_config(spec, seed),
        cfg.mixture_config(spec),
        StateScaler::from_spec(spec)?,
    )
}

/// Trains one seed to `max_episodes`, or until solved when configured.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutcome> {
    let mut env = make(&cfg.env)?;
    let spec = env.spec().clone();
    let mut agent = new_agent(cfg, &spec, seed)?;
    let mut records = Vec::new();
    let mut returns = Vec::new();
    let mut frozen_at = None;
    let mut error = None;
    let mut solved_at = None;
    for episode in 0..cfg.max_episodes {
        let start = Instant::now();
        let outcome = run_episode(&mut agent, env.as_mut(), episode_seed(seed, episode as u64), true)
            .and_then(|(ret, steps)| agent.end_episode(ret).map(|froze| (ret, steps, froze)));
        let (ret, steps, froze) = match outcome {
            Ok(v) => v,
            Err(e) => {
                error = Some(format!("episode {episode}: {e}"));
                break;
            }
        };
        if froze {
            frozen_at = Some(episode);
        }
        let ms = if cfg.timing {
            start.elapsed().as_millis() as u64
        } else {
            0
        };
        records.push(RunRecord {
            seed,
            episode,
            ret,
            steps,
            components: agent.model().len(),
            ms,
        });
        returns.push(ret);
        if solved_at.is_none() {
            solved_at = solved(&returns, &spec);
        }
        if cfg.stop_when_solved && solved_at.is_some() {
            break;
        }
    }
    Ok(SeedOutcome {
        seed,
        records,
        solved: solved_at,
        frozen_at,
        model: agent.into_model(),
        error,
    })
}

/// Per-seed entry of the summary file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub episodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve_episode: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frozen_at: Option<usize>,
    pub final_components: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Aggregate of an experiment, written as `summary.toml`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub env: String,
    pub config_hash: String,
    pub max_episodes: usize,
    pub seeds_total: usize,
    pub seeds_solved: usize,
    pub seeds_aborted: usize,
    /// Solve episodes over every seed; unsolved seeds count as `max_episodes`.
    pub all_seeds: Stats,
    /// Solve episodes over solved seeds only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solved_seeds: Option<Stats>,
    pub median_solve_episode: f64,
    pub median_final_components: f64,
    pub seed: Vec<SeedSummary>,
}

impl Summary {
    pub fn from_outcomes(cfg: &ExperimentConfig, outcomes: &[SeedOutcome]) -> Self {
        let seeds: Vec<SeedSummary> = outcomes
            .iter()
            .map(|o| SeedSummary {
                seed: o.seed,
                episodes: o.records.len(),
                solve_episode: o.solved,
                frozen_at: o.frozen_at,
                final_components: o.final_components(),
                error: o.error.clone(),
            })
            .collect();
        let censored: Vec<f64> = seeds
            .iter()
            .map(|s| s.solve_episode.unwrap_or(cfg.max_episodes) as f64)
            .collect();
        let solved: Vec<f64> = seeds.iter().filter_map(|s| s.solve_episode).map(|e| e as f64).collect();
        let components: Vec<f64> = seeds.iter().map(|s| s.final_components as f64).collect();
        Self {
            env: cfg.env.clone(),
            config_hash: cfg.hash(),
            max_episodes: cfg.max_episodes,
            seeds_total: seeds.len(),
            seeds_solved: solved.len(),
            seeds_aborted: seeds.iter().filter(|s| s.error.is_some()).count(),
            all_seeds: describe(&censored),
            solved_seeds: (!solved.is_empty()).then(|| describe(&solved)),
            median_solve_episode: median(&censored),
            median_final_components: median(&components),
            seed: seeds,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("summary is always serialisable")
    }
}

/// What [`run_experiment`] produced.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub outcomes: Vec<SeedOutcome>,
    pub summary: Summary,
}

impl Experiment {
    pub fn any_aborted(&self) -> bool {
        self.outcomes.iter().any(|o| o.error.is_some())
    }
}

pub fn csv_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed_{seed}.csv"))
}

pub fn model_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("model_seed_{seed}.txt"))
}

/// Trains every configured seed and writes CSVs, models and the summary
/// into `cfg.out_dir`. Seeds that hit a numerical failure are reported in
/// the summary instead of failing the whole experiment.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<Experiment> {
    cfg.validate()?;
    let results = par::map(exec, &cfg.seeds, |&seed| run_seed(cfg, seed));
    let outcomes = results.into_iter().collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    for o in &outcomes {
        std::fs::write(csv_path(&cfg.out_dir, o.seed), o.to_csv())?;
        if cfg.save_models {
            save_model(&o.model, &model_path(&cfg.out_dir, o.seed))?;
        }
    }
    std::fs::write(cfg.out_dir.join("config.toml"), cfg.to_toml())?;
    let summary = Summary::from_outcomes(cfg, &outcomes);
    std::fs::write(cfg.out_dir.join("summary.toml"), summary.to_toml())?;
    Ok(Experiment { outcomes, summary })
}

/// Reads the returns column of a CSV written by [`run_experiment`].
pub fn read_csv_returns(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse("missing CSV header".into()));
    }
    lines
        .map(|line| {
            line.split(',')
                .nth(1)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("bad CSV row `{line}`")))
        })
        .collect()
}
