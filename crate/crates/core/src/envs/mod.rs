//! Classic-control tasks with seeded resets and explicit truncation.
//!
//! Physics follow the reference classic-control implementations; every
//! constant lives in the task's own module. [`make`] selects a task by
//! name.

mod acrobot;
mod cartpole;
mod mountain_car;
mod solve;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use acrobot::{Acrobot, AcrobotActions};
pub use cartpole::{CartPole, CART_VELOCITY_CAP, POLE_VELOCITY_CAP};
pub use mountain_car::MountainCar;
pub use solve::{solved, window_means};

/// Number of consecutive episodes averaged for the solve criterion.
pub const SOLVE_WINDOW: usize = 100;

/// Registered task names.
pub const ENV_NAMES: [&str; 5] = [
    "mountain_car_v0",
    "cartpole_v0",
    "cartpole_v1",
    "acrobot_v0",
    "acrobot_v1",
];

/// Static description of a task.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub name: &'static str,
    pub observation_low: Vec<f64>,
    pub observation_high: Vec<f64>,
    pub action_count: usize,
    pub max_steps: usize,
    /// Mean return over [`SOLVE_WINDOW`] episodes that counts as solved.
    pub solve_threshold: f64,
    pub solve_window: usize,
}

impl EnvSpec {
    pub fn observation_dim(&self) -> usize {
        self.observation_low.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: f64,
    /// The task reached a terminal state.
    pub terminated: bool,
    /// The episode hit the step limit without terminating.
    pub truncated: bool,
}

impl StepResult {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

/// The per-task physics behind [`Env`].
pub trait Dynamics: Send {
    fn spec(&self) -> EnvSpec;
    /// Draws an initial state from the task's start distribution.
    fn sample_initial(&mut self, rng: &mut ChaCha8Rng);
    /// Advances one tick; returns the reward and whether the new state is
    /// terminal.
    fn advance(&mut self, action: usize) -> (f64, bool);
    fn state(&self) -> &[f64];
    fn set_state(&mut self, state: &[f64]);
}

/// Common interface over all tasks.
pub trait Environment: Send {
    fn spec(&self) -> &EnvSpec;
    fn reset(&mut self, seed: u64) -> Vec<f64>;
    fn step(&mut self, action: usize) -> Result<StepResult>;
    /// Raw simulator state, before observation clamping.
    fn state(&self) -> Vec<f64>;
    /// Overwrites the simulator state and starts a fresh episode from it.
    fn set_state(&mut self, state: &[f64]) -> Result<()>;
}

/// A task wrapped with step counting, truncation and observation clamping.
pub struct Env<D> {
    dynamics: D,
    spec: EnvSpec,
    steps: usize,
    finished: bool,
}

impl<D: Dynamics> Env<D> {
    pub fn new(dynamics: D) -> Self {
        let spec = dynamics.spec();
        Self {
            dynamics,
            spec,
            steps: 0,
            finished: false,
        }
    }

    pub fn dynamics(&self) -> &D {
        &self.dynamics
    }

    fn observation(&self) -> Vec<f64> {
        self.dynamics
            .state()
            .iter()
            .zip(self.spec.observation_low.iter().zip(&self.spec.observation_high))
            .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
            .collect()
    }
}

impl<D: Dynamics> Environment for Env<D> {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.dynamics.sample_initial(&mut rng);
        self.steps = 0;
        self.finished = false;
        self.observation()
    }

    fn step(&mut self, action: usize) -> Result<StepResult> {
        if self.finished {
            return Err(Error::StepAfterEnd);
        }
        if action >= self.spec.action_count {
            return Err(Error::Domain(format!(
                "action {action} out of range for {} ({} actions)",
                self.spec.name, self.spec.action_count
            )));
        }
        let (reward, terminated) = self.dynamics.advance(action);
        self.steps += 1;
        let truncated = !terminated && self.steps >= self.spec.max_steps;
        self.finished = terminated || truncated;
        Ok(StepResult {
            observation: self.observation(),
            reward,
            terminated,
            truncated,
        })
    }

    fn state(&self) -> Vec<f64> {
        self.dynamics.state().to_vec()
    }

    fn set_state(&mut self, state: &[f64]) -> Result<()> {
        crate::error::check_dim(self.dynamics.state().len(), state.len())?;
        self.dynamics.set_state(state);
        self.steps = 0;
        self.finished = false;
        Ok(())
    }
}

/// Builds a task by name.
pub fn make(name: &str) -> Result<Box<dyn Environment>> {
    Ok(match name {
        "mountain_car_v0" => Box::new(Env::new(MountainCar::new())),
        "cartpole_v0" => Box::new(Env::new(CartPole::v0())),
        "cartpole_v1" => Box::new(Env::new(CartPole::v1())),
        "acrobot_v0" => Box::new(Env::new(Acrobot::v0())),
        "acrobot_v1" => Box::new(Env::new(Acrobot::v1())),
        other => return Err(Error::UnknownEnv(other.to_string())),
    })
}

/// Spec of a task by name, without building it.
pub fn spec_for(name: &str) -> Result<EnvSpec> {
    Ok(make(name)?.spec().clone())
}
