//! The Q-IGMN agent.
//!
//! One mixture models the joint space of scaled states and one Q-value per
//! action. Actions are chosen ε-greedily from the inferred Q-values;
//! transitions go onto a LIFO stack that is replayed most-recent-first when
//! it fills up or the episode terminates, one model update per transition.

mod config;
mod replay;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::gmm::{MaskedVector, Mixture, MixtureConfig};

pub use config::{AgentConfig, Schedule, StateScaler};
pub use replay::{ReplayStack, Transition};

/// Episodes averaged by the early-stop test.
pub const EARLY_STOP_WINDOW: usize = 100;

/// Mixture configuration over `state_dim` scaled state dimensions followed by
/// `action_count` Q dimensions. `state_sigma` is a standard deviation on the
/// unit-scaled states, `q_sigma` one in reward units.
pub fn joint_mixture_config(state_dim: usize, action_count: usize, state_sigma: f64, q_sigma: f64) -> MixtureConfig {
    let mut sigma = vec![state_sigma * state_sigma; state_dim];
    sigma.resize(state_dim + action_count, q_sigma * q_sigma);
    let mut cfg = MixtureConfig::new(sigma);
    cfg.q_dims = (state_dim..state_dim + action_count).collect();
    cfg
}

#[derive(Debug, Clone)]
pub struct Agent {
    config: AgentConfig,
    model: Mixture,
    stack: ReplayStack,
    scaler: StateScaler,
    rng: ChaCha8Rng,
    epsilon: f64,
    alpha: f64,
    frozen: bool,
    episode_returns: Vec<f64>,
    learn_calls: u64,
}

impl Agent {
    pub fn new(config: AgentConfig, mixture: MixtureConfig, scaler: StateScaler) -> Result<Self> {
        config.validate()?;
        let model = Mixture::new(mixture)?;
        Self::with_model(config, model, scaler)
    }

    /// Wraps an existing model, e.g. one loaded from disk.
    pub fn with_model(config: AgentConfig, mut model: Mixture, scaler: StateScaler) -> Result<Self> {
        config.validate()?;
        check_dim(scaler.dim() + config.action_count, model.dim())?;
        model.set_q_alpha(config.alpha.initial);
        Ok(Self {
            stack: ReplayStack::new(config.replay_capacity)?,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            epsilon: config.epsilon.initial,
            alpha: config.alpha.initial,
            frozen: false,
            episode_returns: Vec::new(),
            learn_calls: 0,
            config,
            model,
            scaler,
        })
    }

    /// A frozen greedy policy over `model`.
    pub fn greedy(model: Mixture, scaler: StateScaler, action_count: usize, seed: u64) -> Result<Self> {
        let mut config = AgentConfig::new(action_count, 1, seed);
        config.epsilon = Schedule::constant(0.0);
        config.alpha = Schedule::constant(0.0);
        let mut agent = Self::with_model(config, model, scaler)?;
        agent.freeze();
        Ok(agent)
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn model(&self) -> &Mixture {
        &self.model
    }

    pub fn into_model(self) -> Mixture {
        self.model
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn episode_returns(&self) -> &[f64] {
        &self.episode_returns
    }

    /// Number of model updates made from replayed transitions.
    pub fn learn_calls(&self) -> u64 {
        self.learn_calls
    }

    pub fn pending(&self) -> usize {
        self.stack.len()
    }

    fn state_dim(&self) -> usize {
        self.scaler.dim()
    }

    /// Inferred Q-values for a raw observation; zeros while the model is
    /// empty.
    pub fn q_values(&self, state: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.state_dim(), state.len())?;
        if self.model.is_empty() {
            return Ok(vec![0.0; self.config.action_count]);
        }
        let query = MaskedVector::with_unknown_tail(&self.scaler.scale(state), self.config.action_count)?;
        self.model.infer(&query)
    }

    fn argmax(&mut self, q: &[f64]) -> usize {
        let best = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = (0..q.len()).filter(|&i| q[i] == best).collect();
        match ties.len() {
            0 => self.rng.random_range(0..q.len()),
            1 => ties[0],
            n => ties[self.rng.random_range(0..n)],
        }
    }

    /// ε-greedy action for a raw observation.
    pub fn select_action(&mut self, state: &[f64]) -> Result<usize> {
        let explore = self.rng.random::<f64>() < self.epsilon;
        if explore || self.model.is_empty() {
            return Ok(self.rng.random_range(0..self.config.action_count));
        }
        let q = self.q_values(state)?;
        Ok(self.argmax(&q))
    }

    /// Greedy action, ties broken at random.
    pub fn greedy_action(&mut self, state: &[f64]) -> Result<usize> {
        let q = self.q_values(state)?;
        Ok(self.argmax(&q))
    }

    /// Stores a transition and replays the stack when it is full or the
    /// transition is terminal. A frozen agent ignores it.
    pub fn observe(&mut self, t: Transition) -> Result<()> {
        if self.frozen {
            return Ok(());
        }
        if t.action >= self.config.action_count {
            return Err(Error::Domain(format!(
                "action {} out of range ({} actions)",
                t.action, self.config.action_count
            )));
        }
        check_dim(self.state_dim(), t.state.len())?;
        check_dim(self.state_dim(), t.next_state.len())?;
        let terminal = t.terminal;
        self.stack.push(t)?;
        if terminal || self.stack.is_full() {
            self.flush_learn()?;
        }
        Ok(())
    }

    /// Pops every stored transition, newest first, and learns its target.
    pub fn flush_learn(&mut self) -> Result<()> {
        let n_actions = self.config.action_count;
        while let Some(t) = self.stack.pop() {
            let target = if t.terminal {
                t.reward
            } else {
                let next = self.q_values(&t.next_state)?;
                let best = next.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                t.reward + self.config.gamma * best
            };
            let mut values = self.scaler.scale(&t.state);
            let mut known = vec![true; values.len()];
            values.resize(values.len() + n_actions, 0.0);
            known.resize(values.len(), false);
            values[self.state_dim() + t.action] = target;
            known[self.state_dim() + t.action] = true;
            self.model.learn(&MaskedVector::new(values, known)?)?;
            self.learn_calls += 1;
        }
        Ok(())
    }

    /// Closes an episode: replays what is left, records the return, decays
    /// ε and α, and applies the early-stop test. Returns true when this call
    /// froze the agent.
    pub fn end_episode(&mut self, episode_return: f64) -> Result<bool> {
        if !self.frozen {
            self.flush_learn()?;
        }
        self.episode_returns.push(episode_return);
        if self.frozen {
            return Ok(false);
        }
        self.epsilon = self.config.epsilon.next(self.epsilon);
        self.alpha = self.config.alpha.next(self.alpha);
        self.model.set_q_alpha(self.alpha);
        if let Some(threshold) = self.config.early_stop {
            let n = self.episode_returns.len().min(EARLY_STOP_WINDOW);
            let recent = &self.episode_returns[self.episode_returns.len() - n..];
            if recent.iter().sum::<f64>() / n as f64 >= threshold {
                self.freeze();
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Stops all learning and exploration for good.
    pub fn freeze(&mut self) {
        self.frozen = true;
        self.epsilon = 0.0;
        self.alpha = 0.0;
        self.stack = ReplayStack::new(self.stack.capacity()).expect("capacity already validated");
    }
}
