use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sparse real vector stored as parallel arrays of strictly increasing
/// indices and their non-zero values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs in any order. Duplicate
    /// indices are summed and exact zeros are dropped.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(i, _)| i);
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            if indices.last() == Some(&i) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(i);
                values.push(v);
            }
        }
        let mut out = Self { indices, values };
        out.drop_zeros();
        out
    }

    /// Builds a vector from a dense slice, skipping zeros.
    pub fn from_dense(dense: &[f64]) -> Self {
        Self::from_pairs(dense.iter().copied().enumerate().filter(|&(_, v)| v != 0.0))
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let (indices, values) = self
            .indices
            .iter()
            .zip(&self.values)
            .filter(|(_, &v)| v != 0.0)
            .map(|(&i, &v)| (i, v))
            .unzip();
        self.indices = indices;
        self.values = values;
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Value at `index`, zero when not stored.
    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    /// Errors when any stored index is outside `[0, dim)`.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.max_index() {
            Some(i) if i >= dim => Err(Error::input(format!(
                "feature index {i} out of range for a vocabulary of size {dim}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self.drop_zeros();
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        sum
    }

    /// Dot product with a dense vector. Indices beyond `dense.len()` panic,
    /// so callers validate dimensions first.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    /// ‖self − other‖², accumulated over the union of stored indices.
    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        while a < self.indices.len() || b < other.indices.len() {
            let ia = self.indices.get(a).copied().unwrap_or(usize::MAX);
            let ib = other.indices.get(b).copied().unwrap_or(usize::MAX);
            let d = match ia.cmp(&ib) {
                std::cmp::Ordering::Less => {
                    a += 1;
                    self.values[a - 1]
                }
                std::cmp::Ordering::Greater => {
                    b += 1;
                    other.values[b - 1]
                }
                std::cmp::Ordering::Equal => {
                    a += 1;
                    b += 1;
                    self.values[a - 1] - other.values[b - 1]
                }
            };
            sum += d * d;
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_pairs_sorts_merges_and_drops_zeros() {
        let v = SparseVector::from_pairs(vec![(3, 1.0), (1, 2.0), (3, -1.0), (0, 0.0), (5, 0.5)]);
        assert_eq!(v.indices(), &[1, 5]);
        assert_eq!(v.values(), &[2.0, 0.5]);
    }

    #[test]
    fn products_and_distances() {
        let x = SparseVector::from_pairs(vec![(0, 1.0), (2, 2.0)]);
        let z = SparseVector::from_pairs(vec![(2, 3.0), (4, 1.0)]);
        assert_eq!(x.dot(&z), 6.0);
        assert_eq!(x.dot_dense(&[1.0, 9.0, 0.5, 0.0, 0.0]), 2.0);
        // (1)^2 + (2-3)^2 + (1)^2
        assert_eq!(x.squared_distance(&z), 3.0);
        assert_eq!(x.squared_distance(&x), 0.0);
        assert_eq!(x.get(2), 2.0);
        assert_eq!(x.get(1), 0.0);
    }

    #[test]
    fn dimension_check() {
        let x = SparseVector::from_pairs(vec![(4, 1.0)]);
        assert!(x.check_dim(5).is_ok());
        assert!(matches!(x.check_dim(4), Err(Error::Input(_))));
        assert!(SparseVector::new().check_dim(0).is_ok());
    }
}
