//! Numerical kernels: χ² quantiles and small dense symmetric matrices.

mod chi2;
mod matrix;

pub use chi2::{chi2_cdf, chi2_quantile, Chi2Threshold};
pub use matrix::{dot, invert_symmetric, rank_one_symmetric_update, Cholesky, SquareMatrix, PIVOT_TOLERANCE};
