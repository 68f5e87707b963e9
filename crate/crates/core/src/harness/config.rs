use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::{joint_mixture_config, AgentConfig, Schedule};
use crate::envs::{spec_for, EnvSpec};
use crate::error::{Error, Result};
use crate::gmm::MixtureConfig;

/// Everything needed to reproduce a training run. Every key has a default;
/// unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: String,
    pub seeds: Vec<u64>,
    pub max_episodes: usize,
    /// Stop a seed as soon as a solving window is complete.
    pub stop_when_solved: bool,
    pub out_dir: PathBuf,

    pub gamma: f64,
    pub epsilon: f64,
    pub epsilon_decay: f64,
    pub epsilon_floor: f64,
    /// Initial decoupled Q learning rate; 0 keeps Q on the `1/sp` rate.
    pub alpha: f64,
    pub alpha_decay: f64,
    pub alpha_floor: f64,
    /// Replay stack size; 0 means the task's episode step limit.
    pub replay_capacity: usize,
    pub early_stop: Option<f64>,

    pub beta: f64,
    /// Initial standard deviation of the state dimensions as a fraction of
    /// their (unit-scaled) range.
    pub state_sigma: f64,
    /// Initial standard deviation of the Q dimensions, in reward units.
    pub q_sigma: f64,
    pub pruning: bool,
    pub v_min: f64,
    pub sp_min: f64,

    /// Record wall-clock milliseconds per episode. Off by default so that
    /// output files are byte-reproducible.
    pub timing: bool,
    pub save_models: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            env: "cartpole_v0".into(),
            seeds: vec![0],
            max_episodes: 300,
            stop_when_solved: true,
            out_dir: PathBuf::from("runs"),
            gamma: 0.99,
            epsilon: 1.0,
            epsilon_decay: 0.9,
            epsilon_floor: 0.0,
            alpha: 0.1,
            alpha_decay: 0.999,
            alpha_floor: 0.01,
            replay_capacity: 0,
            early_stop: None,
            beta: 0.1,
            state_sigma: 0.3,
            q_sigma: 20.0,
            pruning: false,
            v_min: 5.0,
            sp_min: 3.0,
            timing: false,
            save_models: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serialisable")
    }

    /// SHA-256 of the canonical serialised form, hex encoded.
    /// SHA-256 of the serialized config. The output directory is left out so
    /// the same experiment written to two places hashes the same.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out_dir = PathBuf::new();
        let digest = Sha256::digest(canonical.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn env_spec(&self) -> Result<EnvSpec> {
        spec_for(&self.env)
    }

    pub fn agent_config(&self, spec: &EnvSpec, seed: u64) -> AgentConfig {
        let capacity = if self.replay_capacity == 0 {
            spec.max_steps
        } else {
            self.replay_capacity
        };
        let mut cfg = AgentConfig::new(spec.action_count, capacity, seed);
        cfg.gamma = self.gamma;
        cfg.epsilon = Schedule {
            initial: self.epsilon,
            decay: self.epsilon_decay,
            floor: self.epsilon_floor,
        };
        cfg.alpha = Schedule {
            initial: self.alpha,
            decay: self.alpha_decay,
            floor: self.alpha_floor,
        };
        cfg.early_stop = self.early_stop;
        cfg
    }

    pub fn mixture_config(&self, spec: &EnvSpec) -> MixtureConfig {
        let mut cfg = joint_mixture_config(spec.observation_dim(), spec.action_count, self.state_sigma, self.q_sigma);
        cfg.beta = self.beta;
        cfg.pruning_enabled = self.pruning;
        cfg.v_min = self.v_min;
        cfg.sp_min = self.sp_min;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.max_episodes == 0 {
            return Err(Error::Config("max_episodes must be positive".into()));
        }
        let spec = self.env_spec().map_err(|e| Error::Config(e.to_string()))?;
        self.agent_config(&spec, 0).validate()?;
        if !(self.state_sigma > 0.0 && self.q_sigma > 0.0) {
            return Err(Error::Config("state_sigma and q_sigma must be positive".into()));
        }
        self.mixture_config(&spec).validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(ExperimentConfig::from_toml_str("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml_str("gama = 0.5").unwrap_err();
        assert!(matches!(err, Error::Config(m) if m.contains("gama")));
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "seeds = []",
            "max_episodes = 0",
            "env = \"pong\"",
            "gamma = 1.5",
            "beta = 0.0",
            "epsilon = 0.1\nepsilon_floor = 0.2",
            "q_sigma = -1.0",
        ] {
            assert!(ExperimentConfig::from_toml_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn round_trip_and_hash() {
        let cfg = ExperimentConfig::from_toml_str("env = \"mountain_car_v0\"\nseeds = [3, 4]\nearly_stop = -122.0").unwrap();
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
        assert_eq!(cfg.hash().len(), 64);
        let mut other = cfg.clone();
        other.seeds = vec![3];
        assert_ne!(cfg.hash(), other.hash());
        let mut moved = cfg.clone();
        moved.out_dir = "elsewhere".into();
        assert_eq!(cfg.hash(), moved.hash());
    }

    #[test]
    fn replay_capacity_defaults_to_episode_length() {
        let cfg = ExperimentConfig::from_toml_str("env = \"mountain_car_v0\"").unwrap();
        let spec = cfg.env_spec().unwrap();
        assert_eq!(cfg.agent_config(&spec, 0).replay_capacity, 200);
        let m = cfg.mixture_config(&spec);
        assert_eq!(m.dim(), 5);
        assert_eq!(m.q_dims, vec![2, 3, 4]);
    }
}
