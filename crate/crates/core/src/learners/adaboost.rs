//! Discrete two-class AdaBoost over depth-1 stumps.

use serde::{Deserialize, Serialize};

use super::{label_of, signed, Label};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaBoostConfig {
    pub n_rounds: usize,
}

impl Default for AdaBoostConfig {
    fn default() -> Self {
        Self { n_rounds: 50 }
    }
}

/// Votes `polarity` when `x[feature] > threshold`, `−polarity` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: i8,
}

impl Stump {
    pub fn vote(&self, x: &SparseVector) -> f64 {
        let p = f64::from(self.polarity);
        if x.get(self.feature) > self.threshold {
            p
        } else {
            -p
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    pub stumps: Vec<Stump>,
    pub stump_weights: Vec<f64>,
    pub n_features: usize,
}

const EPS_CLAMP: f64 = 1e-10;

/// `α = ½ ln((1 − ε) / ε)` with `ε` clamped to `[1e-10, 1 − 1e-10]`.
pub fn adaboost_stump_weight(epsilon: f64) -> f64 {
    let e = epsilon.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP);
    0.5 * ((1.0 - e) / e).ln()
}

/// Per-feature values sorted ascending, zeros folded into one group.
struct Column {
    /// `(value, sample)` for the non-zero entries, sorted by value.
    nonzero: Vec<(f64, usize)>,
}

fn build_columns(xs: &[SparseVector], n_features: usize) -> Vec<Column> {
    let mut cols: Vec<Column> = (0..n_features).map(|_| Column { nonzero: Vec::new() }).collect();
    for (s, x) in xs.iter().enumerate() {
        for (i, v) in x.iter() {
            cols[i].nonzero.push((v, s));
        }
    }
    for c in &mut cols {
        c.nonzero.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    cols
}

struct BestStump {
    stump: Stump,
    error: f64,
}

/// Lowest weighted-error stump on one feature. Thresholds are midpoints
/// between consecutive distinct observed values (implicit zeros included).
fn best_on_feature(
    col: &Column,
    feature: usize,
    n_samples: usize,
    weights: &[f64],
    ys: &[f64],
    class_totals: [f64; 2],
) -> Option<BestStump> {
    // weight mass of negatives / positives among the implicit zeros
    let mut zero = class_totals;
    for &(_, s) in &col.nonzero {
        zero[usize::from(ys[s] > 0.0)] -= weights[s];
    }
    let has_zero = col.nonzero.len() < n_samples;

    // Groups of equal values in ascending order: (value, [w_neg, w_pos]).
    let mut groups: Vec<(f64, [f64; 2])> = Vec::new();
    let mut zero_placed = !has_zero;
    for &(v, s) in &col.nonzero {
        if !zero_placed && v > 0.0 {
            groups.push((0.0, zero));
            zero_placed = true;
        }
        let k = usize::from(ys[s] > 0.0);
        match groups.last_mut() {
            Some((gv, w)) if *gv == v => w[k] += weights[s],
            _ => {
                let mut w = [0.0; 2];
                w[k] = weights[s];
                groups.push((v, w));
            }
        }
    }
    if !zero_placed {
        groups.push((0.0, zero));
    }

    let total = class_totals[0] + class_totals[1];
    let mut left = [0.0; 2];
    let mut best: Option<BestStump> = None;
    for pair in groups.windows(2) {
        let (lo, w) = pair[0];
        let hi = pair[1].0;
        left[0] += w[0];
        left[1] += w[1];
        // polarity +1: left predicts −1, right predicts +1
        let err_pos = left[1] + (class_totals[0] - left[0]);
        let (err, polarity) = if err_pos <= total - err_pos {
            (err_pos, 1)
        } else {
            (total - err_pos, -1)
        };
        if best.as_ref().map_or(true, |b| err < b.error) {
            let mut threshold = lo + (hi - lo) / 2.0;
            if threshold >= hi {
                threshold = lo;
            }
            best = Some(BestStump {
                stump: Stump {
                    feature,
                    threshold,
                    polarity,
                },
                error: err,
            });
        }
    }
    best
}

impl AdaBoost {
    pub fn fit(config: &AdaBoostConfig, xs: &[SparseVector], labels: &[Label], n_features: usize) -> Result<Self> {
        if config.n_rounds == 0 {
            return Err(Error::Config("AdaBoost needs at least one round".into()));
        }
        let n = xs.len();
        let ys: Vec<f64> = labels.iter().map(|&y| signed(y)).collect();
        let cols = build_columns(xs, n_features);
        let mut weights = vec![1.0 / n as f64; n];
        let mut stumps = Vec::new();
        let mut stump_weights = Vec::new();
        for _ in 0..config.n_rounds {
            let mut totals = [0.0; 2];
            for (w, y) in weights.iter().zip(&ys) {
                totals[usize::from(*y > 0.0)] += w;
            }
            let mut best: Option<BestStump> = None;
            for (f, col) in cols.iter().enumerate() {
                if let Some(c) = best_on_feature(col, f, n, &weights, &ys, totals) {
                    if best.as_ref().map_or(true, |b| c.error < b.error) {
                        best = Some(c);
                    }
                }
            }
            let Some(BestStump { stump, error }) = best else {
                break;
            };
            let alpha = adaboost_stump_weight(error);
            if alpha <= 0.0 {
                // no stump beats chance on the current weighting
                break;
            }
            stumps.push(stump);
            stump_weights.push(alpha);
            if error <= EPS_CLAMP {
                break;
            }
            for ((w, x), y) in weights.iter_mut().zip(xs).zip(&ys) {
                *w *= (-alpha * y * stump.vote(x)).exp();
            }
            let z: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= z);
        }
        Ok(Self {
            stumps,
            stump_weights,
            n_features,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn decision(&self, x: &SparseVector) -> f64 {
        self.stumps
            .iter()
            .zip(&self.stump_weights)
            .map(|(s, a)| a * s.vote(x))
            .sum()
    }

    pub fn predict(&self, x: &SparseVector) -> Label {
        label_of(self.decision(x))
    }
}
