//! Multinomial naive Bayes over TF-IDF weights, which are treated as
//! fractional event counts.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{class_counts, Label};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NaiveBayesConfig {
    /// Additive (Laplace/Lidstone) smoothing.
    pub alpha: f64,
}

impl Default for NaiveBayesConfig {
    fn default() -> Self {
        Self { alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub alpha: f64,
    pub class_log_prior: [f64; 2],
    /// `feature_log_likelihood[c][i] = ln P(token i | class c)`.
    pub feature_log_likelihood: [Vec<f64>; 2],
}

impl NaiveBayes {
    pub fn fit(config: &NaiveBayesConfig, xs: &[SparseVector], labels: &[Label], n_features: usize) -> Result<Self> {
        if config.alpha.partial_cmp(&0.0) != Some(Ordering::Greater) {
            return Err(Error::Config("naive Bayes smoothing alpha must be positive".into()));
        }
        if n_features == 0 {
            return Err(Error::fit("naive Bayes needs at least one feature"));
        }
        if let Some((i, _)) = xs.iter().flat_map(|x| x.iter()).find(|&(_, v)| v < 0.0) {
            return Err(Error::fit(format!("negative feature value at index {i}")));
        }
        let n = labels.len() as f64;
        let counts = class_counts(labels);
        let mut feature_count = [vec![0.0; n_features], vec![0.0; n_features]];
        for (x, &y) in xs.iter().zip(labels) {
            let row = &mut feature_count[usize::from(y)];
            for (i, v) in x.iter() {
                row[i] += v;
            }
        }
        let feature_log_likelihood = feature_count.map(|row| {
            let denom = (row.iter().sum::<f64>() + config.alpha * n_features as f64).ln();
            row.iter().map(|c| (c + config.alpha).ln() - denom).collect()
        });
        Ok(Self {
            alpha: config.alpha,
            class_log_prior: counts.map(|c| (c as f64 / n).ln()),
            feature_log_likelihood,
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_log_likelihood[0].len()
    }

    /// `[score_0, score_1]` with `score_c = ln P(c) + Σ_i x_i ln P(i | c)`.
    pub fn log_posterior(&self, x: &SparseVector) -> [f64; 2] {
        [0, 1].map(|c| self.class_log_prior[c] + x.dot_dense(&self.feature_log_likelihood[c]))
    }

    /// Ties go to class 0.
    pub fn predict(&self, x: &SparseVector) -> Label {
        let [s0, s1] = self.log_posterior(x);
        Label::from(s1 > s0)
    }
}
