//! Q-IGMN: a fast incremental Gaussian mixture network (FIGMN) used as the
//! Q-value approximator of an ε-greedy agent on classic-control tasks.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: χ² quantiles, small dense symmetric matrices, Cholesky.
//! * [`gmm`]: the online mixture estimator with rank-one precision updates
//!   and conditional-Gaussian recall over masked vectors.
//! * [`agent`]: the Q-IGMN agent with a LIFO replay stack.
//! * [`envs`]: mountain car, cart-pole and acrobot with seeded resets.
//! * [`harness`]: experiment configuration, seeded runs, CSV/summary output
//!   and greedy evaluation of persisted models.
//!
//! Data-parallel work (seed sweeps, batch recall, evaluation episodes) goes
//! through [`par`], which uses rayon when the `parallel` feature is enabled
//! and falls back to plain iterators otherwise.

pub mod agent;
pub mod envs;
pub mod error;
pub mod gmm;
pub mod harness;
pub mod numerics;
pub mod par;

pub use error::{Error, Result};
