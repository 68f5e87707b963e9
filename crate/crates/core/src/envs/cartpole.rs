use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Dynamics, EnvSpec, SOLVE_WINDOW};

pub const GRAVITY: f64 = 9.8;
pub const MASS_CART: f64 = 1.0;
pub const MASS_POLE: f64 = 0.1;
pub const TOTAL_MASS: f64 = MASS_CART + MASS_POLE;
/// Half the pole length.
pub const LENGTH: f64 = 0.5;
pub const POLE_MASS_LENGTH: f64 = MASS_POLE * LENGTH;
pub const FORCE_MAG: f64 = 10.0;
pub const TAU: f64 = 0.02;
pub const THETA_THRESHOLD: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
pub const X_THRESHOLD: f64 = 2.4;

/// Observation caps for the two unbounded velocity dimensions.
pub const CART_VELOCITY_CAP: f64 = 3.0;
pub const POLE_VELOCITY_CAP: f64 = 4.0;

/// Pole balanced on a cart, Euler-integrated. Actions: 0 push left,
/// 1 push right. State is `(x, ẋ, θ, θ̇)`.
#[derive(Debug, Clone)]
pub struct CartPole {
    state: [f64; 4],
    name: &'static str,
    max_steps: usize,
    solve_threshold: f64,
}

impl CartPole {
    pub fn v0() -> Self {
        Self {
            state: [0.0; 4],
            name: "cartpole_v0",
            max_steps: 200,
            solve_threshold: 195.0,
        }
    }

    pub fn v1() -> Self {
        Self {
            state: [0.0; 4],
            name: "cartpole_v1",
            max_steps: 500,
            solve_threshold: 475.0,
        }
    }
}

impl Dynamics for CartPole {
    fn spec(&self) -> EnvSpec {
        EnvSpec {
            name: self.name,
            observation_low: vec![-X_THRESHOLD, -CART_VELOCITY_CAP, -THETA_THRESHOLD, -POLE_VELOCITY_CAP],
            observation_high: vec![X_THRESHOLD, CART_VELOCITY_CAP, THETA_THRESHOLD, POLE_VELOCITY_CAP],
            action_count: 2,
            max_steps: self.max_steps,
            solve_threshold: self.solve_threshold,
            solve_window: SOLVE_WINDOW,
        }
    }

    fn sample_initial(&mut self, rng: &mut ChaCha8Rng) {
        for v in &mut self.state {
            *v = rng.random_range(-0.05..0.05);
        }
    }

    fn advance(&mut self, action: usize) -> (f64, bool) {
        let [x, x_dot, theta, theta_dot] = self.state;
        let force = if action == 1 { FORCE_MAG } else { -FORCE_MAG };
        let (sin, cos) = theta.sin_cos();
        let temp = (force + POLE_MASS_LENGTH * theta_dot * theta_dot * sin) / TOTAL_MASS;
        let theta_acc =
            (GRAVITY * sin - cos * temp) / (LENGTH * (4.0 / 3.0 - MASS_POLE * cos * cos / TOTAL_MASS));
        let x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos / TOTAL_MASS;
        self.state = [
            x + TAU * x_dot,
            x_dot + TAU * x_acc,
            theta + TAU * theta_dot,
            theta_dot + TAU * theta_acc,
        ];
        let [x, _, theta, _] = self.state;
        let terminated = x < -X_THRESHOLD || x > X_THRESHOLD || theta < -THETA_THRESHOLD || theta > THETA_THRESHOLD;
        (1.0, terminated)
    }

    fn state(&self) -> &[f64] {
        &self.state
    }

    fn set_state(&mut self, state: &[f64]) {
        self.state.copy_from_slice(state);
    }
}
