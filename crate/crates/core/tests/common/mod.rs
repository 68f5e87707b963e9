//! Covariance-form reference implementation used as an oracle.
//!
//! Everything here works on explicit covariance matrices with a plain
//! Gauss-Jordan inverse and LU determinant, sharing no code with the crate.
#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(n: usize) -> Mat {
    vec![vec![0.0; n]; n]
}

pub fn diag(v: &[f64]) -> Mat {
    let mut m = zeros(v.len());
    for (i, x) in v.iter().enumerate() {
        m[i][i] = *x;
    }
    m
}

pub fn inverse(m: &Mat) -> Mat {
    let n = m.len();
    let mut a = m.clone();
    let mut inv = diag(&vec![1.0; n]);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    inv
}

pub fn det(m: &Mat) -> f64 {
    let n = m.len();
    let mut a = m.clone();
    let mut d = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(col, pivot);
            d = -d;
        }
        d *= a[col][col];
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            for j in col..n {
                a[i][j] -= f * a[col][j];
            }
        }
    }
    d
}

pub fn sub(m: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
    rows.iter().map(|&r| cols.iter().map(|&c| m[r][c]).collect()).collect()
}

pub fn mat_vec(m: &Mat, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn quad(m: &Mat, v: &[f64]) -> f64 {
    mat_vec(m, v).iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn frobenius(m: &Mat) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// ‖a − b‖_F / ‖b‖_F for a row-major slice `a`.
pub fn rel_frobenius(a: &[f64], b: &Mat) -> f64 {
    let n = b.len();
    let diff: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (a[i * n + j] - b[i][j]).powi(2))
        .sum::<f64>()
        .sqrt();
    diff / frobenius(b)
}

pub fn chi2_threshold(dof: usize, percentile: f64) -> f64 {
    ChiSquared::new(dof as f64).unwrap().inverse_cdf(percentile)
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone)]
pub struct OracleComponent {
    pub mean: Vec<f64>,
    pub cov: Mat,
    pub sp: f64,
    pub prior: f64,
}

/// What one oracle step decided, for comparison with the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub updated: bool,
    /// Smallest `d² − threshold` over components (negative means update).
    pub margin: f64,
    pub resets: usize,
}

#[derive(Debug, Clone)]
pub struct Oracle {
    pub beta: f64,
    pub sigma_ini: Vec<f64>,
    pub comps: Vec<OracleComponent>,
}

pub struct Split {
    pub known: Vec<usize>,
    pub unknown: Vec<usize>,
}

impl Split {
    pub fn new(mask: &[bool]) -> Self {
        Self {
            known: (0..mask.len()).filter(|&i| mask[i]).collect(),
            unknown: (0..mask.len()).filter(|&i| !mask[i]).collect(),
        }
    }
}

impl Oracle {
    pub fn new(beta: f64, sigma_ini: Vec<f64>) -> Self {
        Self {
            beta,
            sigma_ini,
            comps: Vec::new(),
        }
    }

    /// Squared distances and log weights over the known block.
    fn known_terms(&self, x: &[f64], s: &Split) -> (Vec<f64>, Vec<f64>) {
        let mut d2s = Vec::new();
        let mut logs = Vec::new();
        for c in &self.comps {
            let cii = sub(&c.cov, &s.known, &s.known);
            let r: Vec<f64> = s.known.iter().map(|&k| x[k] - c.mean[k]).collect();
            let d2 = quad(&inverse(&cii), &r);
            let logdet = det(&cii).ln();
            d2s.push(d2);
            logs.push(c.prior.ln() - 0.5 * (d2 + logdet + s.known.len() as f64 * LN_2PI));
        }
        (d2s, logs)
    }

    pub fn posteriors(&self, x: &[f64], s: &Split) -> Vec<f64> {
        let (d2s, logs) = self.known_terms(x, s);
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        if top.is_finite() && total > 0.0 {
            w.iter().map(|v| v / total).collect()
        } else {
            let best = (0..d2s.len()).min_by(|&i, &j| d2s[i].total_cmp(&d2s[j])).unwrap();
            (0..d2s.len()).map(|i| if i == best { 1.0 } else { 0.0 }).collect()
        }
    }

    /// `μ_t + Σ_ti Σ_ii⁻¹ (x_i − μ_i)` for one component.
    pub fn conditional(c: &OracleComponent, x: &[f64], s: &Split) -> Vec<f64> {
        let cii_inv = inverse(&sub(&c.cov, &s.known, &s.known));
        let cti = sub(&c.cov, &s.unknown, &s.known);
        let r: Vec<f64> = s.known.iter().map(|&k| x[k] - c.mean[k]).collect();
        let w = mat_vec(&cii_inv, &r);
        s.unknown
            .iter()
            .enumerate()
            .map(|(a, &t)| c.mean[t] + cti[a].iter().zip(&w).map(|(p, q)| p * q).sum::<f64>())
            .collect()
    }

    pub fn infer(&self, x: &[f64], mask: &[bool]) -> Vec<f64> {
        let s = Split::new(mask);
        let post = self.posteriors(x, &s);
        let mut out = vec![0.0; s.unknown.len()];
        for (c, p) in self.comps.iter().zip(&post) {
            for (o, v) in out.iter_mut().zip(Self::conditional(c, x, &s)) {
                *o += p * v;
            }
        }
        out
    }

    fn fill(x: &[f64], s: &Split, values: &[f64]) -> Vec<f64> {
        let mut full = x.to_vec();
        for (&t, v) in s.unknown.iter().zip(values) {
            full[t] = *v;
        }
        full
    }

    fn create(&mut self, x: Vec<f64>) {
        self.comps.push(OracleComponent {
            mean: x,
            cov: diag(&self.sigma_ini),
            sp: 1.0,
            prior: 0.0,
        });
        self.renormalise();
    }

    fn renormalise(&mut self) {
        let total: f64 = self.comps.iter().map(|c| c.sp).sum();
        for c in &mut self.comps {
            c.prior = c.sp / total;
        }
    }

    /// One learning step. `force` pins the create/update choice (to follow
    /// the crate through near-threshold ties); the oracle's own choice is
    /// still reported.
    pub fn learn(&mut self, x: &[f64], mask: &[bool], force: Option<bool>) -> Decision {
        let s = Split::new(mask);
        if self.comps.is_empty() {
            let full = Self::fill(x, &s, &vec![0.0; s.unknown.len()]);
            self.create(full);
            return Decision {
                updated: false,
                margin: f64::INFINITY,
                resets: 0,
            };
        }
        let threshold = chi2_threshold(s.known.len(), 1.0 - self.beta);
        let (d2s, _) = self.known_terms(x, &s);
        let margin = d2s.iter().map(|d| d - threshold).fold(f64::INFINITY, f64::min);
        let update = force.unwrap_or(margin < 0.0);
        let mut resets = 0;
        if update {
            let post = self.posteriors(x, &s);
            let sigma_ini = self.sigma_ini.clone();
            for (c, p) in self.comps.iter_mut().zip(&post) {
                let full = Self::fill(x, &s, &Self::conditional(c, x, &s));
                c.sp += p;
                let omega = p / c.sp;
                let e: Vec<f64> = full.iter().zip(&c.mean).map(|(a, m)| a - m).collect();
                let dmu: Vec<f64> = e.iter().map(|v| omega * v).collect();
                for (m, d) in c.mean.iter_mut().zip(&dmu) {
                    *m += d;
                }
                let es: Vec<f64> = full.iter().zip(&c.mean).map(|(a, m)| a - m).collect();
                let n = e.len();
                let mut next = zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        next[i][j] = (1.0 - omega) * c.cov[i][j] + omega * es[i] * es[j] - dmu[i] * dmu[j];
                    }
                }
                let d = det(&next);
                if omega > 0.0 && (!(d > 0.0) || !d.is_finite() || d < 1e-300) {
                    next = diag(&sigma_ini);
                    resets += 1;
                }
                c.cov = next;
            }
            self.renormalise();
        } else {
            let full = if s.unknown.is_empty() {
                x.to_vec()
            } else {
                Self::fill(x, &s, &self.infer(x, mask))
            };
            self.create(full);
        }
        Decision {
            updated: margin < 0.0,
            margin,
            resets,
        }
    }
}
