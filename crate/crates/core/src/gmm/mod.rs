//! The fast incremental Gaussian mixture network.
//!
//! Each component keeps its precision matrix and covariance determinant
//! current through rank-one updates, so learning never inverts a full
//! matrix. Recall conditions on any subset of known dimensions using
//! precision blocks; only the (small) unknown block is factorised.

mod component;
mod masked;
mod mixture;
pub mod persist;


pub use component::{ConditionalView, GaussianComponent, MIN_COV_DET};
pub use masked::MaskedVector;
pub use mixture::{normalize_log_weights, normalize_weights, LearnOutcome, LearnStats, Mixture, MixtureConfig};
pub use persist::{load_model, read_model, save_model, write_model};
