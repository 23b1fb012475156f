use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-10;

/// A probability distribution over the `2^n` computational basis outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Validates entries in `[0, 1]` summing to one. Round-off negatives
    /// down to `-1e-12` are clamped to zero.
    pub fn new(mut probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("no entries".into()));
        }
        for p in probabilities.iter_mut() {
            if !p.is_finite() || *p < -1e-12 || *p > 1.0 + 1e-12 {
                return Err(Error::InvalidDistribution(format!("entry {p} outside [0, 1]")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self(probabilities))
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroWeights);
        }
        Ok(Self(weights.iter().map(|w| w / total).collect()))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    /// Point mass on `index`.
    pub fn delta(len: usize, index: usize) -> Self {
        let mut p = vec![0.0; len];
        p[index] = 1.0;
        Self(p)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(self.len(), other.len()));
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Reorders outcomes: entry `i` of the result is entry `map(i)` of `self`.
    pub(crate) fn reindex(&self, map: impl Fn(usize) -> usize) -> Self {
        Self((0..self.len()).map(|i| self.0[map(i)]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sums() {
        assert!(Distribution::new(vec![0.5, 0.4]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn weights_normalize() {
        let d = Distribution::from_weights(&[1.0, 3.0]).unwrap();
        assert_eq!(d.probabilities(), &[0.25, 0.75]);
        assert_eq!(Distribution::from_weights(&[0.0, 0.0]), Err(Error::ZeroWeights));
    }
}
