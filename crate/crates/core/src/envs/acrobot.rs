use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Dynamics, EnvSpec, SOLVE_WINDOW};

pub const DT: f64 = 0.2;
pub const LINK_LENGTH_1: f64 = 1.0;
pub const LINK_MASS_1: f64 = 1.0;
pub const LINK_MASS_2: f64 = 1.0;
/// Position of each link's centre of mass.
pub const LINK_COM_1: f64 = 0.5;
pub const LINK_COM_2: f64 = 0.5;
pub const LINK_MOI: f64 = 1.0;
pub const GRAVITY: f64 = 9.8;
pub const MAX_VEL_1: f64 = 4.0 * PI;
pub const MAX_VEL_2: f64 = 9.0 * PI;

/// Which torques the discrete actions map to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcrobotActions {
    /// `{-1, 0, +1}` on the elbow joint only.
    ElbowOnly,
    /// `+1`, `-1` on the shoulder, then `+1`, `-1` on the elbow.
    BothJoints,
}

impl AcrobotActions {
    pub fn count(self) -> usize {
        match self {
            AcrobotActions::ElbowOnly => 3,
            AcrobotActions::BothJoints => 4,
        }
    }

    /// `(shoulder, elbow)` torques for an action index.
    pub fn torques(self, action: usize) -> (f64, f64) {
        match self {
            AcrobotActions::ElbowOnly => (0.0, action as f64 - 1.0),
            AcrobotActions::BothJoints => match action {
                0 => (1.0, 0.0),
                1 => (-1.0, 0.0),
                2 => (0.0, 1.0),
                _ => (0.0, -1.0),
            },
        }
    }
}

/// Two-link pendulum swung up from hanging. State is
/// `(θ1, θ2, θ̇1, θ̇2)` with angles wrapped into `(-π, π]`.
#[derive(Debug, Clone)]
pub struct Acrobot {
    state: [f64; 4],
    actions: AcrobotActions,
    name: &'static str,
    max_steps: usize,
}

impl Acrobot {
    /// Four actions, 200-step episodes.
    pub fn v0() -> Self {
        Self {
            state: [0.0; 4],
            actions: AcrobotActions::BothJoints,
            name: "acrobot_v0",
            max_steps: 200,
        }
    }

    /// Elbow-only actions, 500-step episodes.
    pub fn v1() -> Self {
        Self {
            state: [0.0; 4],
            actions: AcrobotActions::ElbowOnly,
            name: "acrobot_v1",
            max_steps: 500,
        }
    }

    pub fn actions(&self) -> AcrobotActions {
        self.actions
    }
}

/// Terms of the manipulator equation `M q̈ + h = τ` at a state.
#[derive(Debug, Clone, Copy)]
pub struct EquationTerms {
    pub d1: f64,
    pub d2: f64,
    pub d22: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// Centripetal term acting on the elbow.
    pub c2: f64,
}

pub fn equation_terms(s: &[f64; 4]) -> EquationTerms {
    let (m1, m2, l1, lc1, lc2) = (LINK_MASS_1, LINK_MASS_2, LINK_LENGTH_1, LINK_COM_1, LINK_COM_2);
    let (i1, i2) = (LINK_MOI, LINK_MOI);
    let [theta1, theta2, dtheta1, dtheta2] = *s;
    let d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos()) + i1 + i2;
    let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + i2;
    let phi2 = m2 * lc2 * GRAVITY * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * theta2.sin()
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * theta2.sin()
        + (m1 * lc1 + m2 * l1) * GRAVITY * (theta1 - PI / 2.0).cos()
        + phi2;
    EquationTerms {
        d1,
        d2,
        d22: m2 * lc2 * lc2 + i2,
        phi1,
        phi2,
        c2: m2 * l1 * lc2 * dtheta1 * dtheta1 * theta2.sin(),
    }
}

/// Joint accelerations under shoulder torque `tau1` and elbow torque `tau2`.
pub fn accelerations(s: &[f64; 4], tau1: f64, tau2: f64) -> (f64, f64) {
    let t = equation_terms(s);
    let ddtheta2 = (tau2 + t.d2 / t.d1 * (t.phi1 - tau1) - t.c2 - t.phi2) / (t.d22 - t.d2 * t.d2 / t.d1);
    let ddtheta1 = (tau1 - t.d2 * ddtheta2 - t.phi1) / t.d1;
    (ddtheta1, ddtheta2)
}

fn derivative(s: &[f64; 4], tau1: f64, tau2: f64) -> [f64; 4] {
    let (a1, a2) = accelerations(s, tau1, tau2);
    [s[2], s[3], a1, a2]
}

fn axpy(s: &[f64; 4], h: f64, k: &[f64; 4]) -> [f64; 4] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2], s[3] + h * k[3]]
}

/// One classical Runge-Kutta step of length [`DT`].
fn rk4(s: &[f64; 4], tau1: f64, tau2: f64) -> [f64; 4] {
    let half = DT / 2.0;
    let k1 = derivative(s, tau1, tau2);
    let k2 = derivative(&axpy(s, half, &k1), tau1, tau2);
    let k3 = derivative(&axpy(s, half, &k2), tau1, tau2);
    let k4 = derivative(&axpy(s, DT, &k3), tau1, tau2);
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = s[i] + DT / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn wrap(mut x: f64) -> f64 {
    while x > PI {
        x -= 2.0 * PI;
    }
    while x < -PI {
        x += 2.0 * PI;
    }
    if x == -PI {
        PI
    } else {
        x
    }
}

impl Dynamics for Acrobot {
    fn spec(&self) -> EnvSpec {
        EnvSpec {
            name: self.name,
            observation_low: vec![-PI, -PI, -MAX_VEL_1, -MAX_VEL_2],
            observation_high: vec![PI, PI, MAX_VEL_1, MAX_VEL_2],
            action_count: self.actions.count(),
            max_steps: self.max_steps,
            solve_threshold: -100.0,
            solve_window: SOLVE_WINDOW,
        }
    }

    fn sample_initial(&mut self, rng: &mut ChaCha8Rng) {
        for v in &mut self.state {
            *v = rng.random_range(-0.1..0.1);
        }
    }

    fn advance(&mut self, action: usize) -> (f64, bool) {
        let (tau1, tau2) = self.actions.torques(action);
        let n = rk4(&self.state, tau1, tau2);
        self.state = [
            wrap(n[0]),
            wrap(n[1]),
            n[2].clamp(-MAX_VEL_1, MAX_VEL_1),
            n[3].clamp(-MAX_VEL_2, MAX_VEL_2),
        ];
        let [t1, t2, _, _] = self.state;
        let terminated = -t1.cos() - (t2 + t1).cos() > 1.0;
        (-1.0, terminated)
    }

    fn state(&self) -> &[f64] {
        &self.state
    }

    fn set_state(&mut self, state: &[f64]) {
        self.state.copy_from_slice(state);
    }
}
