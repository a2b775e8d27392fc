//! The base classifiers and their shared numeric kernels.
//!
//! Every learner fits on TF-IDF [`SparseVector`]s with binary labels
//! (`1` = sarcastic, `0` = not) and is fully deterministic given its seed.
//! Margin-based learners map labels to `±1` internally with sarcastic = `+1`.

pub mod adaboost;
pub mod adam;
pub mod forest;
pub mod knn;
pub mod linear;
pub mod mlp;
pub mod naive_bayes;
pub mod rbf;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensemble::{self, VotingConfig, VotingModel};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

pub use adaboost::{AdaBoost, AdaBoostConfig};
pub use forest::{Forest, ForestConfig, MaxFeatures};
pub use knn::{Knn, KnnConfig};
pub use linear::{LinearConfig, LinearModel};
pub use mlp::{Mlp, MlpConfig};
pub use naive_bayes::{NaiveBayes, NaiveBayesConfig};
pub use rbf::{RbfSvm, RbfSvmConfig};

/// Binary class label: `1` sarcastic, `0` non-sarcastic.
pub type Label = u8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    SvmLinear,
    SvmRbf,
    Mnb,
    SgdHinge,
    Mlp,
    RandomForest,
    Knn,
    Adaboost,
    Voting,
}

impl LearnerKind {
    /// Report order: the eight base learners followed by the vote.
    pub const ALL: [LearnerKind; 9] = [
        LearnerKind::SvmLinear,
        LearnerKind::SvmRbf,
        LearnerKind::Mnb,
        LearnerKind::SgdHinge,
        LearnerKind::Mlp,
        LearnerKind::RandomForest,
        LearnerKind::Knn,
        LearnerKind::Adaboost,
        LearnerKind::Voting,
    ];

    pub const BASE: [LearnerKind; 8] = [
        LearnerKind::SvmLinear,
        LearnerKind::SvmRbf,
        LearnerKind::Mnb,
        LearnerKind::SgdHinge,
        LearnerKind::Mlp,
        LearnerKind::RandomForest,
        LearnerKind::Knn,
        LearnerKind::Adaboost,
    ];

    /// Identifier used on the command line and in archives.
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::SvmLinear => "svm_linear",
            LearnerKind::SvmRbf => "svm_rbf",
            LearnerKind::Mnb => "mnb",
            LearnerKind::SgdHinge => "sgd_hinge",
            LearnerKind::Mlp => "mlp",
            LearnerKind::RandomForest => "random_forest",
            LearnerKind::Knn => "knn",
            LearnerKind::Adaboost => "adaboost",
            LearnerKind::Voting => "voting",
        }
    }

    /// Label used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            LearnerKind::SvmLinear => "SVM-Linear",
            LearnerKind::SvmRbf => "SVM-RBF",
            LearnerKind::Mnb => "MNB",
            LearnerKind::SgdHinge => "SGD",
            LearnerKind::Mlp => "MLP",
            LearnerKind::RandomForest => "RF",
            LearnerKind::Knn => "KNN",
            LearnerKind::Adaboost => "AdaBoost",
            LearnerKind::Voting => "Voting",
        }
    }

    fn stream_id(self) -> u64 {
        LearnerKind::ALL.iter().position(|&k| k == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown classifier `{s}`")))
    }
}

/// Hyperparameter blocks for every learner kind. Only the block matching
/// the fitted kind is consulted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hyperparameters {
    pub svm_linear: LinearConfig,
    pub svm_rbf: RbfSvmConfig,
    pub mnb: NaiveBayesConfig,
    #[serde(deserialize_with = "linear::deserialize_sgd")]
    pub sgd_hinge: LinearConfig,
    pub mlp: MlpConfig,
    pub random_forest: ForestConfig,
    pub knn: KnnConfig,
    pub adaboost: AdaBoostConfig,
    pub voting: VotingConfig,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            svm_linear: LinearConfig::svm(),
            svm_rbf: RbfSvmConfig::default(),
            mnb: NaiveBayesConfig::default(),
            sgd_hinge: LinearConfig::sgd(),
            mlp: MlpConfig::default(),
            random_forest: ForestConfig::default(),
            knn: KnnConfig::default(),
            adaboost: AdaBoostConfig::default(),
            voting: VotingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub hyperparameters: Hyperparameters,
    pub seed: u64,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind, seed: u64) -> Self {
        Self {
            kind,
            hyperparameters: Hyperparameters::default(),
            seed,
        }
    }

    pub fn with_hyperparameters(mut self, hyperparameters: Hyperparameters) -> Self {
        self.hyperparameters = hyperparameters;
        self
    }

    /// Seed for a learner of this spec when it is one member among several.
    /// Depends only on the spec's own seed and kind, so adding or removing
    /// other members never changes it.
    pub fn member_seed(&self) -> u64 {
        crate::seed::derive(self.seed, self.kind.stream_id())
    }
}

/// A fitted classifier of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum TrainedModel {
    SvmLinear(LinearModel),
    SvmRbf(RbfSvm),
    Mnb(NaiveBayes),
    SgdHinge(LinearModel),
    Mlp(Mlp),
    RandomForest(Forest),
    Knn(Knn),
    Adaboost(AdaBoost),
    Voting(VotingModel),
}

impl TrainedModel {
    pub fn kind(&self) -> LearnerKind {
        match self {
            TrainedModel::SvmLinear(_) => LearnerKind::SvmLinear,
            TrainedModel::SvmRbf(_) => LearnerKind::SvmRbf,
            TrainedModel::Mnb(_) => LearnerKind::Mnb,
            TrainedModel::SgdHinge(_) => LearnerKind::SgdHinge,
            TrainedModel::Mlp(_) => LearnerKind::Mlp,
            TrainedModel::RandomForest(_) => LearnerKind::RandomForest,
            TrainedModel::Knn(_) => LearnerKind::Knn,
            TrainedModel::Adaboost(_) => LearnerKind::Adaboost,
            TrainedModel::Voting(_) => LearnerKind::Voting,
        }
    }

    /// Dimension of the feature space the model was fitted on.
    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::SvmLinear(m) | TrainedModel::SgdHinge(m) => m.n_features(),
            TrainedModel::SvmRbf(m) => m.n_features(),
            TrainedModel::Mnb(m) => m.n_features(),
            TrainedModel::Mlp(m) => m.n_features(),
            TrainedModel::RandomForest(m) => m.n_features(),
            TrainedModel::Knn(m) => m.n_features(),
            TrainedModel::Adaboost(m) => m.n_features(),
            TrainedModel::Voting(m) => m.n_features(),
        }
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Label> {
        x.check_dim(self.n_features())?;
        Ok(self.predict_unchecked(x))
    }

    pub fn predict_batch(&self, xs: &[SparseVector]) -> Result<Vec<Label>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    pub(crate) fn predict_unchecked(&self, x: &SparseVector) -> Label {
        match self {
            TrainedModel::SvmLinear(m) | TrainedModel::SgdHinge(m) => m.predict(x),
            TrainedModel::SvmRbf(m) => m.predict(x),
            TrainedModel::Mnb(m) => m.predict(x),
            TrainedModel::Mlp(m) => m.predict(x),
            TrainedModel::RandomForest(m) => m.predict(x),
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::Adaboost(m) => m.predict(x),
            TrainedModel::Voting(m) => m.predict_unchecked(x),
        }
    }
}

/// Fits a learner of `spec.kind` on `vectors` over a feature space of
/// dimension `n_features`.
pub fn fit(spec: &LearnerSpec, vectors: &[SparseVector], labels: &[Label], n_features: usize) -> Result<TrainedModel> {
    check_training_set(vectors, labels, n_features)?;
    let hp = &spec.hyperparameters;
    let seed = spec.seed;
    Ok(match spec.kind {
        LearnerKind::SvmLinear => {
            TrainedModel::SvmLinear(LinearModel::fit(&hp.svm_linear, vectors, labels, n_features, seed)?)
        }
        LearnerKind::SgdHinge => {
            TrainedModel::SgdHinge(LinearModel::fit(&hp.sgd_hinge, vectors, labels, n_features, seed)?)
        }
        LearnerKind::SvmRbf => TrainedModel::SvmRbf(RbfSvm::fit(&hp.svm_rbf, vectors, labels, n_features, seed)?),
        LearnerKind::Mnb => TrainedModel::Mnb(NaiveBayes::fit(&hp.mnb, vectors, labels, n_features)?),
        LearnerKind::Mlp => TrainedModel::Mlp(Mlp::fit(&hp.mlp, vectors, labels, n_features, seed)?),
        LearnerKind::RandomForest => {
            TrainedModel::RandomForest(Forest::fit(&hp.random_forest, vectors, labels, n_features, seed)?)
        }
        LearnerKind::Knn => TrainedModel::Knn(Knn::fit(&hp.knn, vectors, labels, n_features)?),
        LearnerKind::Adaboost => TrainedModel::Adaboost(AdaBoost::fit(&hp.adaboost, vectors, labels, n_features)?),
        LearnerKind::Voting => {
            let specs = ensemble::member_specs(&hp.voting, hp, seed);
            TrainedModel::Voting(ensemble::fit_voting(
                &specs,
                hp.voting.tie_break,
                vectors,
                labels,
                n_features,
            )?)
        }
    })
}

pub(crate) fn check_training_set(vectors: &[SparseVector], labels: &[Label], n_features: usize) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::fit("empty training set"));
    }
    if vectors.len() != labels.len() {
        return Err(Error::Shape {
            expected: vectors.len(),
            actual: labels.len(),
        });
    }
    if vectors.len() < 2 {
        return Err(Error::fit("at least two training samples are required"));
    }
    if let Some(bad) = labels.iter().find(|&&y| y > 1) {
        return Err(Error::fit(format!("label {bad} is not 0 or 1")));
    }
    let positives = labels.iter().filter(|&&y| y == 1).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::fit("training labels contain a single class"));
    }
    for x in vectors {
        x.check_dim(n_features)?;
    }
    Ok(())
}

/// `0 → −1`, `1 → +1`.
pub(crate) fn signed(label: Label) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Positive decision values are sarcastic; zero falls to class 0.
pub(crate) fn label_of(score: f64) -> Label {
    Label::from(score > 0.0)
}

/// Class counts `[n0, n1]`.
pub(crate) fn class_counts(labels: &[Label]) -> [usize; 2] {
    let ones = labels.iter().filter(|&&y| y == 1).count();
    [labels.len() - ones, ones]
}
