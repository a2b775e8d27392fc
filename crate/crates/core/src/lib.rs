//! Sarcasm detection for Arabic tweets with classical learners.
//!
//! The pipeline cleans raw text ([`preprocess`]), turns it into unigram
//! TF-IDF vectors ([`vectorize`]), and fits one of eight base classifiers
//! ([`learners`]) or a hard-voting ensemble over them ([`ensemble`]).
//! [`evaluation`] provides the F1 metrics and stratified k-fold
//! cross-validation; [`corpus`] and [`archive`] handle datasets and
//! model files.

pub mod archive;
pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod learners;
pub mod pipeline;
pub mod preprocess;
pub mod seed;
pub mod sparse;
pub mod vectorize;

pub use archive::{load_model, save_model, ModelArchive, TrainingMeta};
pub use corpus::{load_dataset, stratified_shuffle, Dataset, Sample, Schema, Table};
pub use ensemble::{fit_voting, hard_vote, TieBreak, VotingConfig, VotingModel};
pub use error::{Error, Result};
pub use evaluation::{
    confusion, cross_validate, cv_table, f1, kfold_split, metrics, ConfusionMatrix, CvReport, MetricsReport,
};
pub use learners::{fit, Hyperparameters, Label, LearnerKind, LearnerSpec, TrainedModel};
pub use pipeline::{PipelineConfig, TextClassifier};
pub use preprocess::PreprocessConfig;
pub use sparse::SparseVector;
pub use vectorize::{TfidfConfig, Vocabulary};
