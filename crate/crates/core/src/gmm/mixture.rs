use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::numerics::{Chi2Threshold, SquareMatrix};
use crate::par::{self, Execution};

use super::component::{ConditionalView, GaussianComponent, MIN_COV_DET};
use super::masked::MaskedVector;

/// Hyperparameters of the mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureConfig {
    /// Creation threshold: a component absorbs a point when its squared
    /// distance lies below the `1 − beta` χ² percentile.
    pub beta: f64,
    /// Initial per-dimension variance of new components.
    pub sigma_ini: Vec<f64>,
    pub v_min: f64,
    pub sp_min: f64,
    pub pruning_enabled: bool,
    /// Dimensions holding Q-values; they use the decoupled rate `q_alpha`.
    pub q_dims: Vec<usize>,
    /// Decoupled mean learning rate for `q_dims`; 0 disables it.
    pub q_alpha: f64,
}

impl MixtureConfig {
    pub fn new(sigma_ini: Vec<f64>) -> Self {
        Self {
            beta: 0.1,
            sigma_ini,
            v_min: 5.0,
            sp_min: 3.0,
            pruning_enabled: false,
            q_dims: Vec::new(),
            q_alpha: 0.0,
        }
    }

    /// Initial variances as `(fraction · range)²` per dimension.
    pub fn sigma_from_ranges(fraction: f64, ranges: &[f64]) -> Vec<f64> {
        ranges.iter().map(|r| (fraction * r).powi(2)).collect()
    }

    pub fn dim(&self) -> usize {
        self.sigma_ini.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Config(format!("beta must lie in (0,1), got {}", self.beta)));
        }
        if self.sigma_ini.is_empty() {
            return Err(Error::Config("sigma_ini must not be empty".into()));
        }
        if let Some(bad) = self.sigma_ini.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::Config(format!("sigma_ini entries must be positive, got {bad}")));
        }
        if let Some(bad) = self.q_dims.iter().find(|&&d| d >= self.dim()) {
            return Err(Error::Config(format!("q_dim {bad} outside 0..{}", self.dim())));
        }
        if !(self.q_alpha >= 0.0 && self.q_alpha.is_finite()) {
            return Err(Error::Config(format!("q_alpha must be >= 0, got {}", self.q_alpha)));
        }
        Ok(())
    }
}

/// Which branch a call to [`Mixture::learn`] took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnOutcome {
    Updated,
    Created,
}

/// Running counters kept for diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LearnStats {
    pub updates: u64,
    pub creations: u64,
    /// Components whose precision was re-initialised after a degenerate
    /// update.
    pub resets: u64,
    pub pruned: u64,
}

/// An incremental Gaussian mixture over joint input/output vectors.
#[derive(Debug, Clone)]
pub struct Mixture {
    dim: usize,
    config: MixtureConfig,
    components: Vec<GaussianComponent>,
    /// χ² thresholds indexed by `dof − 1`.
    thresholds: Vec<Chi2Threshold>,
    q_mask: Vec<bool>,
    init_precision: SquareMatrix,
    init_cov_det: f64,
    stats: LearnStats,
}

impl Mixture {
    pub fn new(config: MixtureConfig) -> Result<Self> {
        config.validate()?;
        let dim = config.dim();
        let thresholds = Chi2Threshold::table(dim, 1.0 - config.beta)?;
        let mut q_mask = vec![false; dim];
        for &d in &config.q_dims {
            q_mask[d] = true;
        }
        let inv: Vec<f64> = config.sigma_ini.iter().map(|s| 1.0 / s).collect();
        let init_cov_det = config.sigma_ini.iter().product();
        Ok(Self {
            dim,
            init_precision: SquareMatrix::from_diagonal(&inv),
            init_cov_det,
            config,
            components: Vec::new(),
            thresholds,
            q_mask,
            stats: LearnStats::default(),
        })
    }

    /// Builds a mixture from existing components. Priors are recomputed from
    /// the accumulators.
    pub fn from_parts(config: MixtureConfig, components: Vec<GaussianComponent>) -> Result<Self> {
        let mut m = Self::new(config)?;
        for c in &components {
            check_dim(m.dim, c.dim())?;
        }
        m.components = components;
        if !m.is_empty() {
            m.recompute_priors();
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn config(&self) -> &MixtureConfig {
        &self.config
    }

    pub fn stats(&self) -> LearnStats {
        self.stats
    }

    /// Threshold for a fully known vector (`dof = dim`).
    pub fn chi2(&self) -> Chi2Threshold {
        self.thresholds[self.dim - 1]
    }

    /// Threshold used when `known` dimensions are observed.
    pub fn threshold_for(&self, known: usize) -> f64 {
        self.thresholds[known - 1].value
    }

    pub fn set_q_alpha(&mut self, alpha: f64) {
        self.config.q_alpha = alpha.max(0.0);
    }

    /// Posterior responsibilities of each component for a fully known `x`.
    /// When every weighted likelihood underflows, the nearest component by
    /// Mahalanobis distance takes all the mass.
    pub fn posteriors(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.is_empty() {
            return Err(Error::EmptyModel);
        }
        check_dim(self.dim, x.len())?;
        let mut distances = Vec::with_capacity(self.len());
        let mut log_w = Vec::with_capacity(self.len());
        for c in &self.components {
            let d2 = c.mahalanobis_sq(x)?;
            let log_norm = 0.5 * (self.dim as f64 * (2.0 * std::f64::consts::PI).ln() + c.cov_det.ln());
            log_w.push(c.prior.ln() - 0.5 * d2 - log_norm);
            distances.push(d2);
        }
        Ok(normalize_log_weights(&log_w).unwrap_or_else(|| one_hot_nearest(&distances)))
    }

    /// Posteriors given only the known part of `x`.
    pub fn masked_posteriors(&self, x: &MaskedVector) -> Result<Vec<f64>> {
        let split = self.split(x)?;
        Ok(split.posteriors(&self.components))
    }

    /// Conditional prediction of the unknown dimensions of `x`.
    pub fn infer(&self, x: &MaskedVector) -> Result<Vec<f64>> {
        if x.unknown_count() == 0 {
            return Err(Error::Domain("inference needs at least one unknown dimension".into()));
        }
        let split = self.split(x)?;
        Ok(split.predict(&self.components))
    }

    /// `infer` over many queries.
    pub fn infer_batch(&self, exec: Execution, queries: &[MaskedVector]) -> Vec<Result<Vec<f64>>> {
        par::map(exec, queries, |q| self.infer(q))
    }

    /// Returns `x` with its unknown dimensions filled by the mixture-level
    /// conditional mean.
    pub fn impute(&self, x: &MaskedVector) -> Result<Vec<f64>> {
        if x.unknown_count() == 0 {
            check_dim(self.dim, x.len())?;
            return Ok(x.values().to_vec());
        }
        let prediction = self.infer(x)?;
        Ok(x.fill_unknown(&prediction))
    }

    /// Presents one (possibly partial) observation to the model: either
    /// updates every component or creates a new one.
    pub fn learn(&mut self, x: &MaskedVector) -> Result<LearnOutcome> {
        check_dim(self.dim, x.len())?;
        if x.values().iter().zip(x.known()).any(|(v, k)| *k && !v.is_finite()) {
            return Err(Error::NumericalFailure("non-finite observation".into()));
        }
        if self.is_empty() {
            let full = x.fill_unknown(&vec![0.0; x.unknown_count()]);
            self.create(&full)?;
            self.prune();
            return Ok(LearnOutcome::Created);
        }
        let split = self.split(x)?;
        let threshold = self.threshold_for(split.known.len());
        let outcome = if split.distances.iter().any(|&d| d < threshold) {
            let posteriors = split.posteriors(&self.components);
            let q_alpha = self.config.q_alpha;
            for (j, comp) in self.components.iter_mut().enumerate() {
                let fill = split.views[j].conditional_mean(comp, &split.residuals[j]);
                let full = x.fill_unknown(&fill);
                let reset = update_component(
                    comp,
                    &full,
                    posteriors[j],
                    &self.q_mask,
                    q_alpha,
                    (&self.init_precision, self.init_cov_det),
                )?;
                self.stats.resets += reset as u64;
            }
            self.stats.updates += 1;
            self.recompute_priors();
            LearnOutcome::Updated
        } else {
            let full = if split.unknown.is_empty() {
                x.values().to_vec()
            } else {
                x.fill_unknown(&split.predict(&self.components))
            };
            self.create(&full)?;
            LearnOutcome::Created
        };
        self.prune();
        Ok(outcome)
    }

    /// Applies one update step with externally supplied posteriors and the
    /// same full vector for every component.
    pub fn update_components(&mut self, x: &[f64], posteriors: &[f64]) -> Result<()> {
        check_dim(self.dim, x.len())?;
        check_dim(self.len(), posteriors.len())?;
        let q_alpha = self.config.q_alpha;
        for (comp, &p) in self.components.iter_mut().zip(posteriors) {
            let reset = update_component(
                comp,
                x,
                p,
                &self.q_mask,
                q_alpha,
                (&self.init_precision, self.init_cov_det),
            )?;
            self.stats.resets += reset as u64;
        }
        self.stats.updates += 1;
        self.recompute_priors();
        Ok(())
    }

    /// Appends a component centred at `x` with the initial diagonal
    /// covariance.
    pub fn create(&mut self, x: &[f64]) -> Result<()> {
        check_dim(self.dim, x.len())?;
        let comp = GaussianComponent::new(x.to_vec(), self.init_precision.clone(), self.init_cov_det)?;
        self.components.push(comp);
        self.stats.creations += 1;
        self.recompute_priors();
        Ok(())
    }

    /// Removes components older than `v_min` whose accumulator stayed below
    /// `sp_min`. The component with the largest accumulator always survives,
    /// so pruning never empties the model. Returns how many were removed;
    /// no-op when pruning is off.
    pub fn prune(&mut self) -> usize {
        if !self.config.pruning_enabled || self.components.is_empty() {
            return 0;
        }
        let (v_min, sp_min) = (self.config.v_min, self.config.sp_min);
        let keep = (0..self.components.len())
            .max_by(|&a, &b| self.components[a].sp.total_cmp(&self.components[b].sp))
            .unwrap_or(0);
        let before = self.components.len();
        let mut i = 0;
        self.components.retain(|c| {
            let stays = i == keep || !((c.age as f64) > v_min && c.sp < sp_min);
            i += 1;
            stays
        });
        let removed = before - self.components.len();
        if removed > 0 {
            self.stats.pruned += removed as u64;
            self.recompute_priors();
        }
        removed
    }

    fn recompute_priors(&mut self) {
        let total: f64 = self.components.iter().map(|c| c.sp).sum();
        for c in &mut self.components {
            c.prior = c.sp / total;
        }
    }

    fn split(&self, x: &MaskedVector) -> Result<Split> {
        if self.is_empty() {
            return Err(Error::EmptyModel);
        }
        check_dim(self.dim, x.len())?;
        let known = x.known_indices();
        let unknown = x.unknown_indices();
        let mut views = Vec::with_capacity(self.len());
        let mut residuals = Vec::with_capacity(self.len());
        let mut distances = Vec::with_capacity(self.len());
        for c in &self.components {
            let view = c.conditional(&known, &unknown)?;
            let r = view.known_residual(c, x.values());
            distances.push(view.distance_sq(&r));
            residuals.push(r);
            views.push(view);
        }
        Ok(Split {
            known,
            unknown,
            views,
            residuals,
            distances,
        })
    }
}

/// Per-component quantities for one known/unknown split.
struct Split {
    known: Vec<usize>,
    unknown: Vec<usize>,
    views: Vec<ConditionalView>,
    residuals: Vec<Vec<f64>>,
    distances: Vec<f64>,
}

impl Split {
    fn posteriors(&self, comps: &[GaussianComponent]) -> Vec<f64> {
        let log_w: Vec<f64> = comps
            .iter()
            .zip(&self.views)
            .zip(&self.distances)
            .map(|((c, v), &d)| c.prior.ln() + v.log_density(d))
            .collect();
        normalize_log_weights(&log_w).unwrap_or_else(|| one_hot_nearest(&self.distances))
    }

    fn predict(&self, comps: &[GaussianComponent]) -> Vec<f64> {
        let post = self.posteriors(comps);
        let mut out = vec![0.0; self.unknown.len()];
        for (j, c) in comps.iter().enumerate() {
            if post[j] == 0.0 {
                continue;
            }
            let cond = self.views[j].conditional_mean(c, &self.residuals[j]);
            for (o, v) in out.iter_mut().zip(cond) {
                *o += post[j] * v;
            }
        }
        out
    }
}

/// Normalises non-negative weights (likelihood × prior products) to sum to
/// one. Returns `None` when they are all zero.
pub fn normalize_weights(weights: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total.is_finite() {
        Some(weights.iter().map(|w| w / total).collect())
    } else {
        None
    }
}

/// Log-sum-exp normalisation. `None` when no weight is finite.
pub fn normalize_log_weights(log_w: &[f64]) -> Option<Vec<f64>> {
    let max = log_w
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return None;
    }
    let w: Vec<f64> = log_w
        .iter()
        .map(|&l| if l.is_finite() { (l - max).exp() } else { 0.0 })
        .collect();
    normalize_weights(&w)
}

fn one_hot_nearest(distances: &[f64]) -> Vec<f64> {
    let mut best = 0;
    for (j, d) in distances.iter().enumerate() {
        if d.total_cmp(&distances[best]).is_lt() {
            best = j;
        }
    }
    let mut out = vec![0.0; distances.len()];
    out[best] = 1.0;
    out
}

/// One incremental step for a single component. Returns `true` when the
/// precision had to be re-initialised.
///
/// The precision update is the Sherman-Morrison inverse of
/// `C ← (1−ω)C + ω e*e*ᵀ − Δμ Δμᵀ` with `e* = (1−ω)e` and `Δμ = ωe`, i.e.
/// `C ← (1−ω)C + k e eᵀ` with `k = ω(1 − 3ω + ω²)`. The determinant follows
/// from the matrix determinant lemma.
pub(crate) fn update_component(
    comp: &mut GaussianComponent,
    x: &[f64],
    posterior: f64,
    q_mask: &[bool],
    q_alpha: f64,
    init: (&SquareMatrix, f64),
) -> Result<bool> {
    if !posterior.is_finite() {
        return Err(Error::NumericalFailure(format!("posterior {posterior}")));
    }
    comp.age += 1;
    comp.sp += posterior;
    let e: Vec<f64> = x.iter().zip(&comp.mean).map(|(a, m)| a - m).collect();
    let omega = posterior / comp.sp;
    let omega_q = posterior * q_alpha;
    for (d, (mu, err)) in comp.mean.iter_mut().zip(&e).enumerate() {
        let rate = if q_alpha > 0.0 && q_mask[d] { omega_q } else { omega };
        *mu += rate * err;
    }
    if omega == 0.0 {
        return Ok(false);
    }

    let dim = comp.dim() as i32;
    let lambda_e = comp.precision.mul_vec(&e)?;
    let q = crate::numerics::dot(&e, &lambda_e);
    let keep = 1.0 - omega;
    let k = omega * (1.0 - 3.0 * omega + omega * omega);
    let denom = keep + k * q;
    let new_det = comp.cov_det * keep.powi(dim) * denom / keep;

    if !(denom > 0.0) || !new_det.is_finite() || new_det < MIN_COV_DET {
        comp.precision = init.0.clone();
        comp.cov_det = init.1;
        return Ok(true);
    }
    comp.precision.scale(1.0 / keep);
    comp.precision.add_scaled_outer(&lambda_e, -k / (keep * denom))?;
    comp.precision.symmetrize();
    if !comp.precision.is_finite() {
        comp.precision = init.0.clone();
        comp.cov_det = init.1;
        return Ok(true);
    }
    comp.cov_det = new_det;
    Ok(false)
}
