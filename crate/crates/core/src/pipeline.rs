//! Raw text in, label out: cleaning, TF-IDF and a fitted learner bundled
//! together.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::learners::{self, Label, LearnerSpec, TrainedModel};
use crate::preprocess::PreprocessConfig;
use crate::sparse::SparseVector;
use crate::vectorize::{self, TfidfConfig, Vocabulary};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub preprocess: PreprocessConfig,
    pub tfidf: TfidfConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextClassifier {
    pub preprocess: PreprocessConfig,
    pub tfidf: TfidfConfig,
    pub vocabulary: Vocabulary,
    pub model: TrainedModel,
}

impl TextClassifier {
    pub fn fit<S: AsRef<str>>(
        spec: &LearnerSpec,
        config: &PipelineConfig,
        texts: &[S],
        labels: &[Label],
    ) -> Result<Self> {
        config.preprocess.validate()?;
        let docs: Vec<Vec<String>> = texts.iter().map(|t| config.preprocess.tokens(t.as_ref())).collect();
        let (vocabulary, vectors) = vectorize::fit_transform_with(&docs, &config.tfidf)?;
        let model = learners::fit(spec, &vectors, labels, vocabulary.len())?;
        Ok(Self {
            preprocess: config.preprocess.clone(),
            tfidf: config.tfidf.clone(),
            vocabulary,
            model,
        })
    }

    pub fn vectorize(&self, text: &str) -> SparseVector {
        let tokens = self.preprocess.tokens(text);
        vectorize::transform_with(&tokens, &self.vocabulary, &self.tfidf)
    }

    pub fn predict(&self, text: &str) -> Result<Label> {
        self.model.predict(&self.vectorize(text))
    }

    pub fn predict_batch<S: AsRef<str>>(&self, texts: &[S]) -> Result<Vec<Label>> {
        texts.iter().map(|t| self.predict(t.as_ref())).collect()
    }
}
