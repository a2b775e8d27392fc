//! Random forest of unpruned Gini decision trees on bootstrap samples.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{class_counts, Label};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `max(1, round(√V))`
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(self, n_features: usize) -> usize {
        let m = match self {
            MaxFeatures::Sqrt => (n_features as f64).sqrt().round() as usize,
            MaxFeatures::All => n_features,
            MaxFeatures::Count(c) => c.min(n_features),
        };
        m.max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 300,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            max_depth: None,
        }
    }
}

/// `1 − Σ p_c²` for a two-class node.
pub fn gini_impurity(class_counts: [usize; 2]) -> Result<f64> {
    if class_counts == [0, 0] {
        return Err(Error::input("Gini impurity of an empty node"));
    }
    Ok(gini(class_counts))
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: Label,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict(&self, x: &SparseVector) -> Label {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x.get(feature) <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

struct SplitCandidate {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

struct TreeBuilder<'a> {
    xs: &'a [SparseVector],
    labels: &'a [Label],
    n_features: usize,
    max_features: usize,
    max_depth: Option<usize>,
    rng: ChaCha8Rng,
}

impl TreeBuilder<'_> {
    fn build(mut self, samples: Vec<usize>) -> DecisionTree {
        let mut nodes = vec![Node::Leaf { class: 0 }];
        let mut stack = vec![(0usize, samples, 0usize)];
        while let Some((slot, samples, depth)) = stack.pop() {
            let counts = class_counts(&samples.iter().map(|&s| self.labels[s]).collect::<Vec<_>>());
            let leaf = Node::Leaf {
                class: Label::from(counts[1] > counts[0]),
            };
            let pure = counts[0] == 0 || counts[1] == 0;
            if pure || self.max_depth.is_some_and(|d| depth >= d) {
                nodes[slot] = leaf;
                continue;
            }
            let Some(split) = self.best_split(&samples) else {
                nodes[slot] = leaf;
                continue;
            };
            let (left, right): (Vec<usize>, Vec<usize>) = samples
                .iter()
                .partition(|&&s| self.xs[s].get(split.feature) <= split.threshold);
            let l = nodes.len();
            nodes.push(Node::Leaf { class: 0 });
            nodes.push(Node::Leaf { class: 0 });
            nodes[slot] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: l,
                right: l + 1,
            };
            stack.push((l + 1, right, depth + 1));
            stack.push((l, left, depth + 1));
        }
        DecisionTree { nodes }
    }

    /// Draws `max_features` features uniformly from all `V`; a drawn feature
    /// that is zero on every node sample cannot split, so only drawn
    /// features from the node's non-zero support are evaluated. If none of
    /// them yields a split, the remaining support is searched in random
    /// order until one does.
    fn best_split(&mut self, samples: &[usize]) -> Option<SplitCandidate> {
        let mut support: Vec<usize> = samples
            .iter()
            .flat_map(|&s| self.xs[s].indices().iter().copied())
            .collect();
        support.sort_unstable();
        support.dedup();
        if support.is_empty() {
            return None;
        }
        support.shuffle(&mut self.rng);

        // Hypergeometric count of support features among `max_features`
        // draws without replacement from all V features.
        let mut hits = 0;
        let (mut pool, mut marked) = (self.n_features, support.len());
        for _ in 0..self.max_features.min(self.n_features) {
            if self.rng.gen_range(0..pool) < marked {
                hits += 1;
                marked -= 1;
            }
            pool -= 1;
        }

        let mut best: Option<SplitCandidate> = None;
        for (visited, &f) in support.iter().enumerate() {
            if visited >= hits && best.is_some() {
                break;
            }
            if let Some(c) = self.evaluate(samples, f) {
                if best.as_ref().map_or(true, |b| c.impurity < b.impurity) {
                    best = Some(c);
                }
            }
        }
        best
    }

    fn evaluate(&self, samples: &[usize], feature: usize) -> Option<SplitCandidate> {
        let mut vals: Vec<(f64, Label)> = samples
            .iter()
            .map(|&s| (self.xs[s].get(feature), self.labels[s]))
            .collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = vals.len();
        let total = class_counts(&vals.iter().map(|v| v.1).collect::<Vec<_>>());
        let mut left = [0usize; 2];
        let mut best: Option<SplitCandidate> = None;
        for p in 0..n - 1 {
            left[usize::from(vals[p].1)] += 1;
            let (lo, hi) = (vals[p].0, vals[p + 1].0);
            if lo == hi {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let nl = (p + 1) as f64;
            let impurity = (nl * gini(left) + (n as f64 - nl) * gini(right)) / n as f64;
            if best.as_ref().map_or(true, |b| impurity < b.impurity) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(SplitCandidate {
                    feature,
                    threshold,
                    impurity,
                });
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub max_features: usize,
    pub bootstrap: bool,
    pub n_features: usize,
}

/// Seed of tree `t`: the `t`-th output of a splitmix64 stream started at
/// `seed`.
pub fn tree_seed(seed: u64, t: usize) -> u64 {
    crate::seed::splitmix64(seed.wrapping_add((t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

impl Forest {
    pub fn fit(
        config: &ForestConfig,
        xs: &[SparseVector],
        labels: &[Label],
        n_features: usize,
        seed: u64,
    ) -> Result<Self> {
        if config.n_trees == 0 {
            return Err(Error::Config("a forest needs at least one tree".into()));
        }
        if n_features == 0 {
            return Err(Error::fit("random forest needs at least one feature"));
        }
        let max_features = config.max_features.resolve(n_features);
        let n = xs.len();
        let trees = (0..config.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = crate::seed::rng(tree_seed(seed, t));
                let samples: Vec<usize> = if config.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                TreeBuilder {
                    xs,
                    labels,
                    n_features,
                    max_features,
                    max_depth: config.max_depth,
                    rng,
                }
                .build(samples)
            })
            .collect();
        Ok(Self {
            trees,
            max_features,
            bootstrap: config.bootstrap,
            n_features,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn tree_predictions(&self, x: &SparseVector) -> Vec<Label> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }

    /// Majority over trees; an even split goes to class 0.
    pub fn predict(&self, x: &SparseVector) -> Label {
        let ones = self.trees.iter().filter(|t| t.predict(x) == 1).count();
        Label::from(2 * ones > self.trees.len())
    }
}
