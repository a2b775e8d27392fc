//! Hinge-loss linear classifiers trained with Pegasos-style sub-gradient steps.
//!
//! Both the linear SVM and the SGD classifier minimise
//! `λ/2 ‖w‖² + 1/n Σ max(0, 1 − y (w·x + b))` with `λ = 1 / (C n)`. They
//! differ in schedule: the SVM uses `η = 1/(λt)` and stops once an epoch
//! moves no weight by more than `tol`; SGD uses `η = 1/(λ(t0 + t))` and
//! always runs its full `max_iter` epochs.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{label_of, signed, Label};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

/// Hyperparameters shared by the linear SVM and the SGD classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinearConfig {
    #[serde(rename = "C")]
    pub c: f64,
    /// Epoch cap.
    pub max_iter: usize,
    /// Early-stop threshold on the largest per-epoch weight change.
    /// `None` always runs `max_iter` epochs.
    pub tol: Option<f64>,
    /// Step-size offset: `η_t = 1 / (λ (t0 + t))`.
    pub t0: f64,
}

impl LinearConfig {
    pub fn svm() -> Self {
        Self {
            c: 1.0,
            max_iter: 1000,
            tol: Some(1e-6),
            t0: 0.0,
        }
    }

    pub fn sgd() -> Self {
        Self {
            c: 1.0,
            max_iter: 10_000,
            tol: None,
            t0: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.c.partial_cmp(&0.0) != Some(Ordering::Greater) || self.max_iter == 0 || self.t0 < 0.0 {
            return Err(Error::Config(format!("invalid linear model parameters {self:?}")));
        }
        Ok(())
    }
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self::svm()
    }
}

/// Reads an `sgd_hinge` block, filling absent fields from [`LinearConfig::sgd`]
/// rather than the SVM defaults.
pub(crate) fn deserialize_sgd<'de, D>(deserializer: D) -> std::result::Result<LinearConfig, D::Error>
where
    D: serde::Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Partial {
        #[serde(rename = "C")]
        c: Option<f64>,
        max_iter: Option<usize>,
        tol: Option<f64>,
        t0: Option<f64>,
    }
    let p = Partial::deserialize(deserializer)?;
    let base = LinearConfig::sgd();
    Ok(LinearConfig {
        c: p.c.unwrap_or(base.c),
        max_iter: p.max_iter.unwrap_or(base.max_iter),
        tol: p.tol.or(base.tol),
        t0: p.t0.unwrap_or(base.t0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub max_iter: usize,
    /// Epochs actually run.
    pub epochs: usize,
}

/// One Pegasos step on dense weights.
///
/// With `η = 1/(λt)`: if `y (w·x + b) < 1` then `w ← (1 − ηλ) w + η y x` and
/// `b ← b + η y`; otherwise only the shrink `w ← (1 − ηλ) w` applies.
pub fn pegasos_step(weights: &mut [f64], bias: &mut f64, x: &SparseVector, y: f64, lambda: f64, t: u64) {
    let eta = 1.0 / (lambda * t as f64);
    let margin = y * (x.dot_dense(weights) + *bias);
    let shrink = 1.0 - eta * lambda;
    weights.iter_mut().for_each(|w| *w *= shrink);
    if margin < 1.0 {
        for (i, v) in x.iter() {
            weights[i] += eta * y * v;
        }
        *bias += eta * y;
    }
}

/// Weights kept as `scale · v` so the shrink costs O(1) per step.
pub(crate) struct ScaledPegasos {
    v: Vec<f64>,
    scale: f64,
    pub(crate) bias: f64,
    pub(crate) lambda: f64,
}

impl ScaledPegasos {
    pub(crate) fn new(n_features: usize, lambda: f64) -> Self {
        Self {
            v: vec![0.0; n_features],
            scale: 1.0,
            bias: 0.0,
            lambda,
        }
    }

    pub(crate) fn decision(&self, x: &SparseVector) -> f64 {
        self.scale * x.dot_dense(&self.v) + self.bias
    }

    pub(crate) fn step(&mut self, x: &SparseVector, y: f64, eta: f64) {
        let margin = y * self.decision(x);
        let shrink = 1.0 - eta * self.lambda;
        if shrink <= 0.0 {
            // A full shrink zeroes w; negative factors only arise from t0 < 1
            // and still reset to the fresh-start state.
            self.v.iter_mut().for_each(|v| *v = 0.0);
            self.scale = 1.0;
        } else {
            self.scale *= shrink;
        }
        if margin < 1.0 {
            let c = eta * y / self.scale;
            for (i, val) in x.iter() {
                self.v[i] += c * val;
            }
            self.bias += eta * y;
        }
        if self.scale < 1e-9 {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        let s = self.scale;
        self.v.iter_mut().for_each(|v| *v *= s);
        self.scale = 1.0;
    }

    pub(crate) fn weights(&self) -> Vec<f64> {
        self.v.iter().map(|v| v * self.scale).collect()
    }
}

/// `λ/2 ‖w‖² + mean hinge loss`.
pub fn hinge_objective(weights: &[f64], bias: f64, xs: &[SparseVector], labels: &[Label], lambda: f64) -> f64 {
    let reg = 0.5 * lambda * weights.iter().map(|w| w * w).sum::<f64>();
    let loss: f64 = xs
        .iter()
        .zip(labels)
        .map(|(x, &y)| (1.0 - signed(y) * (x.dot_dense(weights) + bias)).max(0.0))
        .sum();
    reg + loss / xs.len() as f64
}

impl LinearModel {
    pub fn fit(
        config: &LinearConfig,
        xs: &[SparseVector],
        labels: &[Label],
        n_features: usize,
        seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        let n = xs.len();
        let lambda = 1.0 / (config.c * n as f64);
        let mut solver = ScaledPegasos::new(n_features, lambda);
        let mut rng = crate::seed::rng(seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut t: u64 = 0;
        let mut prev = vec![0.0; n_features];
        let mut prev_bias = 0.0;
        let mut epochs = 0;
        for _ in 0..config.max_iter {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * (config.t0 + t as f64));
                solver.step(&xs[i], signed(labels[i]), eta);
            }
            epochs += 1;
            if let Some(tol) = config.tol {
                let w = solver.weights();
                let delta = w
                    .iter()
                    .zip(&prev)
                    .map(|(a, b)| (a - b).abs())
                    .fold((solver.bias - prev_bias).abs(), f64::max);
                if delta < tol {
                    break;
                }
                prev = w;
                prev_bias = solver.bias;
            }
        }
        Ok(Self {
            weights: solver.weights(),
            bias: solver.bias,
            c: config.c,
            max_iter: config.max_iter,
            epochs,
        })
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot_dense(&self.weights) + self.bias
    }

    pub fn predict(&self, x: &SparseVector) -> Label {
        label_of(self.decision(x))
    }
}
