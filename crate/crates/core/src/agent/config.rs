use crate::envs::EnvSpec;
use crate::error::{Error, Result};

/// Multiplicative per-episode decay with a floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub initial: f64,
    pub decay: f64,
    pub floor: f64,
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Self {
            initial: value,
            decay: 1.0,
            floor: value,
        }
    }

    pub fn next(&self, current: f64) -> f64 {
        (current * self.decay).max(self.floor)
    }

    fn validate(&self, name: &str, upper: Option<f64>) -> Result<()> {
        let in_range = |v: f64| v >= 0.0 && v.is_finite() && upper.is_none_or(|u| v <= u);
        if !(in_range(self.initial) && in_range(self.floor) && self.floor <= self.initial) {
            return Err(Error::Config(format!(
                "{name}: need 0 <= floor ({}) <= initial ({})",
                self.floor, self.initial
            )));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::Config(format!("{name}: decay must lie in (0,1], got {}", self.decay)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub gamma: f64,
    pub epsilon: Schedule,
    /// Learning rate of the Q dimensions; an initial value of 0 keeps them on
    /// the ordinary `1/sp` rate.
    pub alpha: Schedule,
    pub replay_capacity: usize,
    /// Freeze learning once the mean of the last 100 returns reaches this.
    pub early_stop: Option<f64>,
    pub action_count: usize,
    pub seed: u64,
}

impl AgentConfig {
    pub fn new(action_count: usize, replay_capacity: usize, seed: u64) -> Self {
        Self {
            gamma: 0.99,
            epsilon: Schedule {
                initial: 1.0,
                decay: 0.9,
                floor: 0.0,
            },
            alpha: Schedule {
                initial: 0.1,
                decay: 0.999,
                floor: 0.01,
            },
            replay_capacity,
            early_stop: None,
            action_count,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma must lie in [0,1], got {}", self.gamma)));
        }
        self.epsilon.validate("epsilon", Some(1.0))?;
        self.alpha.validate("alpha", None)?;
        if self.replay_capacity == 0 {
            return Err(Error::Config("replay capacity must be positive".into()));
        }
        if self.action_count == 0 {
            return Err(Error::Config("need at least one action".into()));
        }
        if self.early_stop.is_some_and(|t| !t.is_finite()) {
            return Err(Error::Config("early-stop threshold must be finite".into()));
        }
        Ok(())
    }
}

/// Min-max scaling of observations to `[0, 1]` per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateScaler {
    low: Vec<f64>,
    span: Vec<f64>,
}

impl StateScaler {
    pub fn new(low: &[f64], high: &[f64]) -> Result<Self> {
        crate::error::check_dim(low.len(), high.len())?;
        let span: Vec<f64> = low.iter().zip(high).map(|(l, h)| h - l).collect();
        if span.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::Config("observation bounds must be finite with low < high".into()));
        }
        Ok(Self {
            low: low.to_vec(),
            span,
        })
    }

    pub fn from_spec(spec: &EnvSpec) -> Result<Self> {
        Self::new(&spec.observation_low, &spec.observation_high)
    }

    pub fn dim(&self) -> usize {
        self.low.len()
    }

    pub fn scale(&self, s: &[f64]) -> Vec<f64> {
        s.iter()
            .zip(self.low.iter().zip(&self.span))
            .map(|(v, (l, w))| (v - l) / w)
            .collect()
    }
}
