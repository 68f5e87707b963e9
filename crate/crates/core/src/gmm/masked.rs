use crate::error::{Error, Result};

/// A vector whose entries are either observed or missing.
///
/// Missing entries carry a placeholder value of 0 and are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedVector {
    values: Vec<f64>,
    known: Vec<bool>,
}

impl MaskedVector {
    pub fn new(values: Vec<f64>, known: Vec<bool>) -> Result<Self> {
        crate::error::check_dim(values.len(), known.len())?;
        if !known.iter().any(|&k| k) {
            return Err(Error::Domain("masked vector needs at least one known entry".into()));
        }
        let values = values
            .into_iter()
            .zip(&known)
            .map(|(v, &k)| if k { v } else { 0.0 })
            .collect();
        Ok(Self { values, known })
    }

    pub fn full(values: Vec<f64>) -> Self {
        let known = vec![true; values.len()];
        Self { values, known }
    }

    pub fn from_options(entries: &[Option<f64>]) -> Result<Self> {
        Self::new(
            entries.iter().map(|e| e.unwrap_or(0.0)).collect(),
            entries.iter().map(Option::is_some).collect(),
        )
    }

    /// `prefix` known, followed by `unknown` missing entries.
    pub fn with_unknown_tail(prefix: &[f64], unknown: usize) -> Result<Self> {
        let mut values = prefix.to_vec();
        values.resize(prefix.len() + unknown, 0.0);
        let mut known = vec![true; prefix.len()];
        known.resize(prefix.len() + unknown, false);
        Self::new(values, known)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn known(&self) -> &[bool] {
        &self.known
    }

    pub fn known_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.known[i]).collect()
    }

    pub fn unknown_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.known[i]).collect()
    }

    pub fn unknown_count(&self) -> usize {
        self.known.iter().filter(|&&k| !k).count()
    }

    /// Copy of the values with the missing entries replaced, in index order,
    /// by `fill`.
    pub fn fill_unknown(&self, fill: &[f64]) -> Vec<f64> {
        let mut it = fill.iter();
        self.values
            .iter()
            .zip(&self.known)
            .map(|(&v, &k)| if k { v } else { *it.next().expect("one fill per unknown") })
            .collect()
    }
}
