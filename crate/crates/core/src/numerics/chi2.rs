//! χ² CDF, quantiles and cached creation thresholds.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// CDF of χ²(`dof`) at `x`.
pub fn chi2_cdf(dof: u32, x: f64) -> f64 {
    match ChiSquared::new(dof as f64) {
        Ok(d) => d.cdf(x),
        Err(_) => f64::NAN,
    }
}

/// The `p` quantile of χ²(`dof`).
pub fn chi2_quantile(dof: u32, p: f64) -> Result<f64> {
    if dof < 1 {
        return Err(Error::Domain(format!("chi-squared dof must be >= 1, got {dof}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile probability must lie in (0,1), got {p}")));
    }
    let d = ChiSquared::new(dof as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(d.inverse_cdf(p))
}

/// A cached χ² percentile for a fixed number of degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Threshold {
    pub dof: u32,
    pub percentile: f64,
    pub value: f64,
}

impl Chi2Threshold {
    pub fn new(dof: u32, percentile: f64) -> Result<Self> {
        Ok(Self {
            dof,
            percentile,
            value: chi2_quantile(dof, percentile)?,
        })
    }

    /// One threshold per dof in `1..=max_dof`, all at the same percentile.
    pub fn table(max_dof: usize, percentile: f64) -> Result<Vec<Self>> {
        (1..=max_dof as u32).map(|d| Self::new(d, percentile)).collect()
    }
}
