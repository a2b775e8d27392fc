//! RBF-kernel SVM trained by kernelized Pegasos.
//!
//! Each training point carries a violation count `α_i`. After `t` steps the
//! implicit weight vector is `w = 1/(λt) Σ α_j y_j φ(x_j)`, which is exactly
//! what linear Pegasos produces when `φ` is the identity.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{label_of, signed, Label};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RbfSvmConfig {
    pub gamma: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub max_epochs: usize,
    /// Off by default: on unnormalized TF-IDF vectors most kernel values
    /// underflow towards zero and a fitted bias ends up deciding alone.
    pub fit_bias: bool,
}

impl Default for RbfSvmConfig {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            c: 1.0,
            max_epochs: 100,
            fit_bias: false,
        }
    }
}

/// `exp(−γ ‖x − z‖²)`.
pub fn rbf_kernel(x: &SparseVector, z: &SparseVector, gamma: f64) -> f64 {
    (-gamma * x.squared_distance(z)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfSvm {
    pub gamma: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// `α_i y_i / (λT)` for each support vector.
    pub support_coefficients: Vec<f64>,
    pub support_vectors: Vec<SparseVector>,
    pub bias: f64,
    pub n_features: usize,
}

/// Result of the kernel solver: violation counts per sample, bias, and
/// the final `1/(λT)` scale.
pub(crate) struct KernelSolution {
    pub alpha: Vec<u64>,
    pub bias: f64,
    pub scale: f64,
}

/// Kernel Pegasos over a fixed visiting order. `kernel(i, j)` evaluates
/// `K(x_i, x_j)`. With `fit_bias` an unregularized bias takes the same
/// `y/(λt)` steps as in [`super::linear::pegasos_step`]; otherwise the
/// bias stays at zero.
pub(crate) fn kernel_pegasos<K>(
    labels: &[Label],
    lambda: f64,
    order: &[usize],
    fit_bias: bool,
    kernel: K,
) -> KernelSolution
where
    K: Fn(usize, usize) -> f64,
{
    let n = labels.len();
    let mut alpha = vec![0u64; n];
    // cache[i] = Σ_j α_j y_j K(x_j, x_i)
    let mut cache = vec![0.0; n];
    let mut bias = 0.0;
    let mut t: u64 = 0;
    for &i in order {
        t += 1;
        let y = signed(labels[i]);
        let f = if t == 1 {
            bias
        } else {
            cache[i] / (lambda * (t - 1) as f64) + bias
        };
        if y * f < 1.0 {
            alpha[i] += 1;
            for (k, c) in cache.iter_mut().enumerate() {
                *c += y * kernel(i, k);
            }
            if fit_bias {
                bias += y / (lambda * t as f64);
            }
        }
    }
    KernelSolution {
        alpha,
        bias,
        scale: 1.0 / (lambda * t.max(1) as f64),
    }
}

impl RbfSvm {
    pub fn fit(
        config: &RbfSvmConfig,
        xs: &[SparseVector],
        labels: &[Label],
        n_features: usize,
        seed: u64,
    ) -> Result<Self> {
        if config.gamma.partial_cmp(&0.0) != Some(Ordering::Greater)
            || config.c.partial_cmp(&0.0) != Some(Ordering::Greater)
            || config.max_epochs == 0
        {
            return Err(Error::Config(format!("invalid RBF SVM parameters {config:?}")));
        }
        let n = xs.len();
        let lambda = 1.0 / (config.c * n as f64);
        let mut rng = crate::seed::rng(seed);
        let mut epoch: Vec<usize> = (0..n).collect();
        let mut order = Vec::with_capacity(n * config.max_epochs);
        for _ in 0..config.max_epochs {
            epoch.shuffle(&mut rng);
            order.extend_from_slice(&epoch);
        }
        let sol = kernel_pegasos(labels, lambda, &order, config.fit_bias, |i, j| {
            rbf_kernel(&xs[i], &xs[j], config.gamma)
        });
        let (support_coefficients, support_vectors) = sol
            .alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| (a as f64 * signed(labels[i]) * sol.scale, xs[i].clone()))
            .unzip();
        Ok(Self {
            gamma: config.gamma,
            c: config.c,
            support_coefficients,
            support_vectors,
            bias: sol.bias,
            n_features,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn decision(&self, x: &SparseVector) -> f64 {
        self.bias
            + self
                .support_vectors
                .iter()
                .zip(&self.support_coefficients)
                .map(|(sv, c)| c * rbf_kernel(sv, x, self.gamma))
                .sum::<f64>()
    }

    pub fn predict(&self, x: &SparseVector) -> Label {
        label_of(self.decision(x))
    }
}
