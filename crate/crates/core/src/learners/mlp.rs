//! One-hidden-layer perceptron with logistic units, trained with Adam on
//! binary cross-entropy.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_update, AdamConfig, AdamState};
use super::{label_of, Label};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpConfig {
    pub hidden_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    /// `None` uses `min(200, n)`.
    pub batch_size: Option<usize>,
    /// Minimum epoch-loss improvement that resets the patience counter.
    pub tol: f64,
    /// Epochs without sufficient improvement before stopping.
    pub n_iter_no_change: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        Self {
            hidden_size: 20,
            learning_rate: adam.learning_rate,
            beta1: adam.beta1,
            beta2: adam.beta2,
            epsilon: adam.epsilon,
            max_epochs: 200,
            batch_size: None,
            tol: 1e-4,
            n_iter_no_change: 10,
        }
    }
}

impl MlpConfig {
    fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.hidden_size == 0
            || self.max_epochs == 0
            || self.batch_size == Some(0)
            || self.learning_rate.partial_cmp(&0.0) != Some(Ordering::Greater)
        {
            return Err(Error::Config(format!("invalid MLP parameters {self:?}")));
        }
        Ok(())
    }
}

/// Parameters live in one flat buffer, laid out as
/// `W1` (n_features × hidden, row-major), `b1`, `W2`, `b2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "MlpRepr", into = "MlpRepr")]
pub struct Mlp {
    n_features: usize,
    hidden: usize,
    params: Vec<f64>,
    adam_state: AdamState,
    config: MlpConfig,
    epochs: usize,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct MlpRepr {
    n_features: usize,
    hidden_size: usize,
    W1: Vec<f64>,
    b1: Vec<f64>,
    W2: Vec<f64>,
    b2: f64,
    adam_state: AdamState,
    config: MlpConfig,
    epochs: usize,
}

impl From<Mlp> for MlpRepr {
    fn from(m: Mlp) -> Self {
        let (w1, b1, w2, b2) = m.split();
        MlpRepr {
            n_features: m.n_features,
            hidden_size: m.hidden,
            W1: w1.to_vec(),
            b1: b1.to_vec(),
            W2: w2.to_vec(),
            b2,
            adam_state: m.adam_state,
            config: m.config,
            epochs: m.epochs,
        }
    }
}

impl From<MlpRepr> for Mlp {
    fn from(r: MlpRepr) -> Self {
        let mut params = r.W1;
        params.extend(r.b1);
        params.extend(r.W2);
        params.push(r.b2);
        Mlp {
            n_features: r.n_features,
            hidden: r.hidden_size,
            params,
            adam_state: r.adam_state,
            config: r.config,
            epochs: r.epochs,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `−[y ln σ(z) + (1−y) ln(1−σ(z))]` computed from the logit.
fn bce_from_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - y * z + (-z.abs()).exp().ln_1p()
}

impl Mlp {
    /// Glorot-uniform initialization of weights and biases.
    pub fn init(config: &MlpConfig, n_features: usize, seed: u64) -> Self {
        let h = config.hidden_size;
        let mut rng = crate::seed::rng(seed);
        let limit1 = (6.0 / (n_features + h) as f64).sqrt();
        let limit2 = (6.0 / (h + 1) as f64).sqrt();
        let mut params = Vec::with_capacity(n_features * h + 2 * h + 1);
        params.extend((0..n_features * h + h).map(|_| rng.gen_range(-limit1..limit1)));
        params.extend((0..h + 1).map(|_| rng.gen_range(-limit2..limit2)));
        let n = params.len();
        Self {
            n_features,
            hidden: h,
            params,
            adam_state: AdamState::new(n),
            config: config.clone(),
            epochs: 0,
        }
    }

    pub fn fit(
        config: &MlpConfig,
        xs: &[SparseVector],
        labels: &[Label],
        n_features: usize,
        seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        let mut model = Self::init(config, n_features, seed);
        // Init and shuffling draw from separate streams of the same seed.
        let mut rng = crate::seed::rng(crate::seed::derive(seed, 1));
        let n = xs.len();
        let batch = config.batch_size.unwrap_or(200).min(n);
        let adam = config.adam();
        let mut order: Vec<usize> = (0..n).collect();
        let mut grad = vec![0.0; model.params.len()];
        let mut best = f64::INFINITY;
        let mut stale = 0;
        for _ in 0..config.max_epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for chunk in order.chunks(batch) {
                let loss = model.accumulate_gradient(chunk.iter().map(|&i| (&xs[i], labels[i])), &mut grad);
                epoch_loss += loss * chunk.len() as f64;
                adam_update(&mut model.params, &grad, &mut model.adam_state, &adam)?;
            }
            model.epochs += 1;
            epoch_loss /= n as f64;
            if epoch_loss > best - config.tol {
                stale += 1;
            } else {
                stale = 0;
            }
            best = best.min(epoch_loss);
            if stale >= config.n_iter_no_change {
                break;
            }
        }
        Ok(model)
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], f64) {
        let (w1, rest) = self.params.split_at(self.n_features * self.hidden);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, b2) = rest.split_at(self.hidden);
        (w1, b1, w2, b2[0])
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn adam_state(&self) -> &AdamState {
        &self.adam_state
    }

    /// The flat parameter buffer (`W1`, `b1`, `W2`, `b2`).
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn hidden_activations(&self, x: &SparseVector, out: &mut [f64]) {
        let (w1, b1, _, _) = self.split();
        out.copy_from_slice(b1);
        for (i, v) in x.iter() {
            let row = &w1[i * self.hidden..(i + 1) * self.hidden];
            for (o, w) in out.iter_mut().zip(row) {
                *o += v * w;
            }
        }
        out.iter_mut().for_each(|o| *o = sigmoid(*o));
    }

    /// Output logit.
    pub fn decision(&self, x: &SparseVector) -> f64 {
        let mut h = vec![0.0; self.hidden];
        self.hidden_activations(x, &mut h);
        let (_, _, w2, b2) = self.split();
        b2 + h.iter().zip(w2).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &SparseVector) -> f64 {
        sigmoid(self.decision(x))
    }

    pub fn predict(&self, x: &SparseVector) -> Label {
        label_of(self.decision(x))
    }

    /// Mean cross-entropy over the batch; writes its gradient into `grad`.
    fn accumulate_gradient<'a, I>(&self, batch: I, grad: &mut [f64]) -> f64
    where
        I: Iterator<Item = (&'a SparseVector, Label)>,
    {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let h_len = self.hidden;
        let w1_len = self.n_features * h_len;
        let (_, _, w2, b2) = self.split();
        let mut h = vec![0.0; h_len];
        let mut dz1 = vec![0.0; h_len];
        let mut loss = 0.0;
        let mut count = 0usize;
        for (x, y) in batch {
            count += 1;
            let y = f64::from(y);
            self.hidden_activations(x, &mut h);
            let z = b2 + h.iter().zip(w2).map(|(a, b)| a * b).sum::<f64>();
            loss += bce_from_logit(z, y);
            let dz2 = sigmoid(z) - y;
            for j in 0..h_len {
                grad[w1_len + h_len + j] += dz2 * h[j];
                dz1[j] = dz2 * w2[j] * h[j] * (1.0 - h[j]);
                grad[w1_len + j] += dz1[j];
            }
            grad[w1_len + 2 * h_len] += dz2;
            for (i, v) in x.iter() {
                let row = &mut grad[i * h_len..(i + 1) * h_len];
                for (g, d) in row.iter_mut().zip(&dz1) {
                    *g += v * d;
                }
            }
        }
        let scale = 1.0 / count.max(1) as f64;
        grad.iter_mut().for_each(|g| *g *= scale);
        loss * scale
    }

    /// Mean binary cross-entropy and its gradient with respect to
    /// [`Mlp::params`].
    pub fn loss_and_gradient(&self, xs: &[SparseVector], labels: &[Label]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let loss = self.accumulate_gradient(xs.iter().zip(labels.iter().copied()), &mut grad);
        (loss, grad)
    }

    pub fn loss(&self, xs: &[SparseVector], labels: &[Label]) -> f64 {
        let total: f64 = xs
            .iter()
            .zip(labels)
            .map(|(x, &y)| bce_from_logit(self.decision(x), f64::from(y)))
            .sum();
        total / xs.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{fit, LearnerKind, LearnerSpec};
    use super::*;

    #[test]
    fn bce_matches_naive_formula() {
        for &(z, y) in &[(0.3, 1.0), (-2.0, 0.0), (4.0, 0.0), (-1.0, 1.0)] {
            let p = sigmoid(z);
            let naive = -(y * p.ln() + (1.0 - y) * (1.0 - p).ln());
            assert!((bce_from_logit(z, y) - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = crate::seed::rng(99);
        let xs: Vec<SparseVector> = (0..5)
            .map(|_| SparseVector::from_dense(&(0..8).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()))
            .collect();
        let ys = vec![1, 0, 1, 1, 0];
        let model = Mlp::init(&MlpConfig::default(), 8, 3);
        let (_, analytic) = model.loss_and_gradient(&xs, &ys);
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for (k, &grad) in analytic.iter().enumerate() {
            let mut plus = model.clone();
            plus.params_mut()[k] += h;
            let mut minus = model.clone();
            minus.params_mut()[k] -= h;
            let numeric = (plus.loss(&xs, &ys) - minus.loss(&xs, &ys)) / (2.0 * h);
            let denom = grad.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max((grad - numeric).abs() / denom);
        }
        assert!(worst < 1e-4, "max relative error {worst}");
    }

    #[test]
    fn learns_xor() {
        let (xs, ys) = xor();
        let mut spec = LearnerSpec::new(LearnerKind::Mlp, 0);
        spec.hyperparameters.mlp.max_epochs = 5000;
        spec.hyperparameters.mlp.learning_rate = 0.05;
        let model = fit(&spec, &xs, &ys, 2).unwrap();
        assert_eq!(accuracy(&model, &xs, &ys), 1.0);
    }

    #[test]
    fn serde_round_trip_preserves_layout() {
        let model = Mlp::init(&MlpConfig::default(), 3, 1);
        let json = serde_json::to_value(&model).unwrap();
        assert_eq!(json["W1"].as_array().unwrap().len(), 60);
        assert_eq!(json["W2"].as_array().unwrap().len(), 20);
        let back: Mlp = serde_json::from_value(json).unwrap();
        assert_eq!(back, model);
    }
}
