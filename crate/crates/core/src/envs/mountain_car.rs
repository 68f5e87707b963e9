use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Dynamics, EnvSpec, SOLVE_WINDOW};

pub const MIN_POSITION: f64 = -1.2;
pub const MAX_POSITION: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const GOAL_POSITION: f64 = 0.5;
pub const FORCE: f64 = 0.001;
pub const GRAVITY: f64 = 0.0025;

/// Under-powered car in a valley. Actions: 0 push left, 1 no push,
/// 2 push right. State is `(position, velocity)`.
#[derive(Debug, Clone)]
pub struct MountainCar {
    state: [f64; 2],
}

impl MountainCar {
    pub fn new() -> Self {
        Self { state: [-0.5, 0.0] }
    }
}

impl Default for MountainCar {
    fn default() -> Self {
        Self::new()
    }
}

impl Dynamics for MountainCar {
    fn spec(&self) -> EnvSpec {
        EnvSpec {
            name: "mountain_car_v0",
            observation_low: vec![MIN_POSITION, -MAX_SPEED],
            observation_high: vec![MAX_POSITION, MAX_SPEED],
            action_count: 3,
            max_steps: 200,
            // "110 steps or less" with −1 per step
            solve_threshold: -110.0,
            solve_window: SOLVE_WINDOW,
        }
    }

    fn sample_initial(&mut self, rng: &mut ChaCha8Rng) {
        self.state = [rng.random_range(-0.6..-0.4), 0.0];
    }

    fn advance(&mut self, action: usize) -> (f64, bool) {
        let [mut position, mut velocity] = self.state;
        velocity += (action as f64 - 1.0) * FORCE + (3.0 * position).cos() * (-GRAVITY);
        velocity = velocity.clamp(-MAX_SPEED, MAX_SPEED);
        position += velocity;
        position = position.clamp(MIN_POSITION, MAX_POSITION);
        if position == MIN_POSITION && velocity < 0.0 {
            velocity = 0.0;
        }
        self.state = [position, velocity];
        (-1.0, position >= GOAL_POSITION && velocity >= 0.0)
    }

    fn state(&self) -> &[f64] {
        &self.state
    }

    fn set_state(&mut self, state: &[f64]) {
        self.state = [state[0], state[1]];
    }
}
