//! k-nearest neighbours under cosine distance.

use serde::{Deserialize, Serialize};

use super::Label;
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self { k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub training_vectors: Vec<SparseVector>,
    pub training_labels: Vec<Label>,
    pub n_features: usize,
}

/// `1 − cos(x, z)`. A zero vector has no direction, so its distance to
/// anything is 1.
pub fn cosine_distance(x: &SparseVector, z: &SparseVector) -> f64 {
    let denom = x.norm() * z.norm();
    if denom == 0.0 {
        1.0
    } else {
        1.0 - x.dot(z) / denom
    }
}

/// Majority label among `neighbors`, which must be ordered nearest first.
/// A tied vote goes to the nearest neighbour's label.
pub fn knn_vote(neighbors: &[Label]) -> Label {
    let ones = neighbors.iter().filter(|&&y| y == 1).count();
    let zeros = neighbors.len() - ones;
    match ones.cmp(&zeros) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => neighbors[0],
    }
}

impl Knn {
    pub fn fit(config: &KnnConfig, xs: &[SparseVector], labels: &[Label], n_features: usize) -> Result<Self> {
        if config.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if config.k > xs.len() {
            return Err(Error::fit(format!(
                "k = {} exceeds the {} training samples",
                config.k,
                xs.len()
            )));
        }
        Ok(Self {
            k: config.k,
            training_vectors: xs.to_vec(),
            training_labels: labels.to_vec(),
            n_features,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Training indices of the `k` nearest neighbours, nearest first. Equal
    /// distances keep the lower training index first.
    pub fn neighbors(&self, x: &SparseVector) -> Vec<usize> {
        let mut scored: Vec<(f64, usize)> = self
            .training_vectors
            .iter()
            .enumerate()
            .map(|(i, t)| (cosine_distance(x, t), i))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    pub fn predict(&self, x: &SparseVector) -> Label {
        let labels: Vec<Label> = self.neighbors(x).into_iter().map(|i| self.training_labels[i]).collect();
        knn_vote(&labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vote_rules() {
        assert_eq!(knn_vote(&[1]), 1);
        assert_eq!(knn_vote(&[1, 1, 0]), 1);
        assert_eq!(knn_vote(&[0, 1, 1, 0]), 0);
        assert_eq!(knn_vote(&[1, 0, 0, 1]), 1);
    }

    #[test]
    fn one_nn_recovers_training_labels() {
        let xs: Vec<SparseVector> = (0..6)
            .map(|i| SparseVector::from_dense(&[1.0 + i as f64, (i * i) as f64 * 0.7, 0.5]))
            .collect();
        let ys = vec![0, 1, 1, 0, 1, 0];
        let knn = Knn::fit(&KnnConfig { k: 1 }, &xs, &ys, 3).unwrap();
        for (x, &y) in xs.iter().zip(&ys) {
            assert_eq!(knn.predict(x), y);
        }
    }

    #[test]
    fn distance_ties_prefer_lower_index() {
        let x = SparseVector::from_dense(&[1.0, 0.0]);
        // Both training points are parallel to x.
        let xs = vec![
            SparseVector::from_dense(&[2.0, 0.0]),
            SparseVector::from_dense(&[3.0, 0.0]),
        ];
        let knn = Knn::fit(&KnnConfig { k: 1 }, &xs, &[1, 0], 2).unwrap();
        assert_eq!(knn.neighbors(&x), vec![0]);
        assert_eq!(knn.predict(&x), 1);
    }

    #[test]
    fn cosine_distance_values() {
        let a = SparseVector::from_dense(&[1.0, 0.0]);
        let b = SparseVector::from_dense(&[0.0, 2.0]);
        assert_eq!(cosine_distance(&a, &b), 1.0);
        assert!(cosine_distance(&a, &a).abs() < 1e-15);
        assert_eq!(cosine_distance(&a, &SparseVector::new()), 1.0);
    }

    #[test]
    fn k_larger_than_training_set() {
        let xs = vec![SparseVector::from_dense(&[1.0])];
        assert!(matches!(
            Knn::fit(&KnnConfig { k: 2 }, &xs, &[1], 1),
            Err(Error::Fit(_))
        ));
    }
}
