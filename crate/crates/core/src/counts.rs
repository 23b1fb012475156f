use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Distribution;

/// Which qubit ordering a table's bin index refers to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisOrder {
    /// `|g1 p1 g2 p2>`.
    #[default]
    Logical,
    /// Device readout order, highest device qubit leftmost.
    Device,
}

/// Shot counts per basis outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsTable {
    bins: Vec<u64>,
    #[serde(default)]
    order: BasisOrder,
}

impl CountsTable {
    /// Logical-order table; length must be `2^n` and the total positive.
    pub fn new(bins: Vec<u64>) -> Result<Self> {
        Self::with_order(bins, BasisOrder::Logical)
    }

    pub fn with_order(bins: Vec<u64>, order: BasisOrder) -> Result<Self> {
        if bins.len() < 2 || !bins.len().is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "counts table needs 2^n bins, got {}",
                bins.len()
            )));
        }
        if bins.iter().sum::<u64>() == 0 {
            return Err(Error::EmptyCounts);
        }
        Ok(Self { bins, order })
    }

    pub fn bins(&self) -> &[u64] {
        &self.bins
    }

    pub fn order(&self) -> BasisOrder {
        self.order
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.bins.len().trailing_zeros() as usize
    }

    pub fn to_distribution(&self) -> Distribution {
        let total = self.total() as f64;
        Distribution::new(self.bins.iter().map(|&b| b as f64 / total).collect())
            .expect("positive total")
    }

    /// Bin-wise sum; every table must share length and ordering.
    pub fn aggregate<'a>(tables: impl IntoIterator<Item = &'a CountsTable>) -> Result<Self> {
        let mut iter = tables.into_iter();
        let first = iter.next().ok_or(Error::EmptyCounts)?;
        let mut bins = first.bins.clone();
        for t in iter {
            if t.len() != bins.len() {
                return Err(Error::DimensionMismatch(bins.len(), t.len()));
            }
            if t.order != first.order {
                return Err(Error::BasisOrderMismatch);
            }
            bins.iter_mut().zip(&t.bins).for_each(|(a, b)| *a += b);
        }
        Self::with_order(bins, first.order)
    }

    pub(crate) fn reindexed(&self, order: BasisOrder, map: impl Fn(usize) -> usize) -> Self {
        Self {
            bins: (0..self.bins.len()).map(|i| self.bins[map(i)]).collect(),
            order,
        }
    }
}

/// Binary label of bin `index` on `num_qubits` qubits, e.g. `"0110"`.
pub fn bin_label(index: usize, num_qubits: usize) -> String {
    let mut s = String::with_capacity(num_qubits);
    for q in 0..num_qubits {
        let bit = (index >> (num_qubits - 1 - q)) & 1;
        write!(s, "{bit}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(bin_label(6, 4), "0110");
        assert_eq!(bin_label(0, 4), "0000");
        assert_eq!(bin_label(15, 4), "1111");
    }

    #[test]
    fn rejects_empty_and_bad_length() {
        assert_eq!(CountsTable::new(vec![0; 16]), Err(Error::EmptyCounts));
        assert!(CountsTable::new(vec![1; 3]).is_err());
    }

    #[test]
    fn aggregate_sums_bins() {
        let a = CountsTable::new(vec![1, 2, 3, 4]).unwrap();
        let b = CountsTable::new(vec![4, 3, 2, 1]).unwrap();
        let s = CountsTable::aggregate([&a, &b]).unwrap();
        assert_eq!(s.bins(), &[5, 5, 5, 5]);
        let d = CountsTable::with_order(vec![1, 0, 0, 0], BasisOrder::Device).unwrap();
        assert_eq!(CountsTable::aggregate([&a, &d]), Err(Error::BasisOrderMismatch));
    }
}
