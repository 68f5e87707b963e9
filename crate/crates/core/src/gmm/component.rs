use crate::error::{check_dim, Error, Result};
use crate::numerics::{dot, Cholesky, SquareMatrix};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Determinants below this are treated as a collapsed component.
pub const MIN_COV_DET: f64 = 1e-300;

/// One Gaussian of the mixture, stored in precision form.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub(crate) mean: Vec<f64>,
    pub(crate) precision: SquareMatrix,
    /// Determinant of the covariance matrix, tracked alongside the precision.
    pub(crate) cov_det: f64,
    /// Posterior accumulator.
    pub(crate) sp: f64,
    pub(crate) age: u64,
    pub(crate) prior: f64,
}

impl GaussianComponent {
    pub fn new(mean: Vec<f64>, precision: SquareMatrix, cov_det: f64) -> Result<Self> {
        check_dim(mean.len(), precision.order())?;
        if !(cov_det > 0.0 && cov_det.is_finite()) {
            return Err(Error::NumericalFailure(format!("covariance determinant {cov_det:e}")));
        }
        Ok(Self {
            mean,
            precision,
            cov_det,
            sp: 1.0,
            age: 1,
            prior: 1.0,
        })
    }

    /// Overrides the accumulator and age of a freshly built component.
    pub fn with_counts(mut self, sp: f64, age: u64) -> Self {
        self.sp = sp;
        self.age = age;
        self
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn precision(&self) -> &SquareMatrix {
        &self.precision
    }

    pub fn cov_det(&self) -> f64 {
        self.cov_det
    }

    pub fn sp(&self) -> f64 {
        self.sp
    }

    pub fn age(&self) -> u64 {
        self.age
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `(x − μ)ᵀ Λ (x − μ)`.
    pub fn mahalanobis_sq(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let e: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        self.precision.quadratic_form(&e)
    }

    /// Multivariate normal density at `x` using the tracked determinant.
    pub fn likelihood(&self, x: &[f64]) -> Result<f64> {
        let d2 = self.mahalanobis_sq(x)?;
        let log_norm = 0.5 * (self.dim() as f64 * LN_2PI + self.cov_det.ln());
        let p = (-0.5 * d2 - log_norm).exp();
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NumericalFailure(format!("non-finite likelihood {p}")))
        }
    }

    /// Marginal and conditional quantities for a known/unknown split of the
    /// dimensions, computed from precision blocks only.
    pub fn conditional(&self, known: &[usize], unknown: &[usize]) -> Result<ConditionalView> {
        let n_known = known.len();
        if unknown.is_empty() {
            return Ok(ConditionalView {
                known: known.to_vec(),
                unknown: Vec::new(),
                known_precision: self.precision.principal_submatrix(known),
                known_log_det: self.cov_det.ln(),
                regression: Vec::new(),
            });
        }
        let lambda_t = self.precision.principal_submatrix(unknown);
        let chol = Cholesky::factor(&lambda_t).map_err(|e| {
            Error::NumericalFailure(format!("unknown-block precision not invertible: {e}"))
        })?;
        // regression = Λ_t⁻¹ Λ_ti, stored row-major (|t| × |i|)
        let n_unknown = unknown.len();
        let mut regression = vec![0.0; n_unknown * n_known];
        let mut column = vec![0.0; n_unknown];
        for (c, &ki) in known.iter().enumerate() {
            for (r, &ti) in unknown.iter().enumerate() {
                column[r] = self.precision[(ti, ki)];
            }
            let solved = chol.solve(&column)?;
            for r in 0..n_unknown {
                regression[r * n_known + c] = solved[r];
            }
        }
        // Σ_i⁻¹ = Λ_i − Λ_it Λ_t⁻¹ Λ_ti
        let mut known_precision = self.precision.principal_submatrix(known);
        for a in 0..n_known {
            for b in 0..n_known {
                let mut s = 0.0;
                for (r, &ti) in unknown.iter().enumerate() {
                    s += self.precision[(known[a], ti)] * regression[r * n_known + b];
                }
                known_precision[(a, b)] -= s;
            }
        }
        known_precision.symmetrize();
        // |Σ_i| = |Σ|·|Λ_t|
        let known_log_det = self.cov_det.ln() + chol.log_determinant();
        Ok(ConditionalView {
            known: known.to_vec(),
            unknown: unknown.to_vec(),
            known_precision,
            known_log_det,
            regression,
        })
    }
}

/// A component seen through a fixed known/unknown split.
#[derive(Debug, Clone)]
pub struct ConditionalView {
    known: Vec<usize>,
    unknown: Vec<usize>,
    /// Inverse covariance of the known block.
    known_precision: SquareMatrix,
    known_log_det: f64,
    regression: Vec<f64>,
}

impl ConditionalView {
    /// `x_i − μ_i` over the known dimensions.
    pub fn known_residual(&self, comp: &GaussianComponent, x: &[f64]) -> Vec<f64> {
        self.known.iter().map(|&k| x[k] - comp.mean[k]).collect()
    }

    pub fn distance_sq(&self, residual: &[f64]) -> f64 {
        self.known_precision
            .quadratic_form(residual)
            .expect("residual has known-block length")
    }

    /// Log of the known-block density (up to nothing; includes 2π terms).
    pub fn log_density(&self, distance_sq: f64) -> f64 {
        -0.5 * (distance_sq + self.known_log_det + self.known.len() as f64 * LN_2PI)
    }

    /// `μ_t − Λ_t⁻¹ Λ_ti (x_i − μ_i)`, one entry per unknown dimension.
    pub fn conditional_mean(&self, comp: &GaussianComponent, residual: &[f64]) -> Vec<f64> {
        let n_known = self.known.len();
        self.unknown
            .iter()
            .enumerate()
            .map(|(r, &t)| {
                comp.mean[t] - dot(&self.regression[r * n_known..(r + 1) * n_known], residual)
            })
            .collect()
    }

    pub fn known_precision(&self) -> &SquareMatrix {
        &self.known_precision
    }

    pub fn known_log_det(&self) -> f64 {
        self.known_log_det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn comp(mean: &[f64], precision: SquareMatrix, det: f64) -> GaussianComponent {
        GaussianComponent::new(mean.to_vec(), precision, det).unwrap()
    }

    #[test]
    fn mahalanobis_examples() {
        let c = comp(&[0.3, -1.0], SquareMatrix::from_rows(&[&[3.0, 1.0], &[1.0, 2.0]]).unwrap(), 0.2);
        assert_eq!(c.mahalanobis_sq(&[0.3, -1.0]).unwrap(), 0.0);

        let c = comp(&[1.0, 1.0], SquareMatrix::identity(2), 1.0);
        assert_abs_diff_eq!(c.mahalanobis_sq(&[2.0, 1.0]).unwrap(), 1.0);

        let c = comp(&[0.0, 0.0], SquareMatrix::from_diagonal(&[2.0, 0.5]), 1.0);
        assert_abs_diff_eq!(c.mahalanobis_sq(&[1.0, 2.0]).unwrap(), 4.0, epsilon = 1e-15);

        assert!(matches!(c.mahalanobis_sq(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn likelihood_examples() {
        let c = comp(&[0.0], SquareMatrix::identity(1), 1.0);
        assert_abs_diff_eq!(c.likelihood(&[0.0]).unwrap(), 0.398_942_280_401_432_7, epsilon = 1e-12);
        assert_abs_diff_eq!(c.likelihood(&[2.0]).unwrap(), 0.053_990_966_513_188_06, epsilon = 1e-12);

        let c = comp(&[0.0, 0.0], SquareMatrix::identity(2), 1.0);
        assert_abs_diff_eq!(
            c.likelihood(&[0.0, 0.0]).unwrap(),
            1.0 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-12
        );
    }

    #[test]
    fn conditional_with_block_diagonal_precision_returns_mean() {
        let c = comp(&[1.0, 2.0, -3.0], SquareMatrix::from_diagonal(&[2.0, 3.0, 4.0]), 1.0 / 24.0);
        let view = c.conditional(&[0, 1], &[2]).unwrap();
        let r = view.known_residual(&c, &[5.0, -7.0, 0.0]);
        assert_eq!(view.conditional_mean(&c, &r), vec![-3.0]);
        // |Σ_i| = |Σ|·|Λ_t| = (1/24)·4 = 1/6
        assert_abs_diff_eq!(view.known_log_det().exp(), 1.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn known_block_matches_covariance_marginal() {
        // Σ = [[2, 0.6], [0.6, 1]]: Σ_i⁻¹ for dim 0 must be 1/2.
        let sigma = SquareMatrix::from_rows(&[&[2.0, 0.6], &[0.6, 1.0]]).unwrap();
        let det = 2.0 - 0.36;
        let lambda = crate::numerics::invert_symmetric(&sigma).unwrap();
        let c = comp(&[0.0, 0.0], lambda, det);
        let view = c.conditional(&[0], &[1]).unwrap();
        assert_abs_diff_eq!(view.known_precision()[(0, 0)], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(view.known_log_det().exp(), 2.0, epsilon = 1e-12);
        // E[x1 | x0 = 1] = Σ_10/Σ_00 · 1 = 0.3
        let r = view.known_residual(&c, &[1.0, 0.0]);
        assert_abs_diff_eq!(view.conditional_mean(&c, &r)[0], 0.3, epsilon = 1e-12);
    }
}
