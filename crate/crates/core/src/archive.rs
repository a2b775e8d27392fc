//! Versioned JSON model archives.
//!
//! The document opens with `"magic": "SAKHR"` and `"format_version": 1`.
//! Every float is written with 17 significant digits so a load reproduces
//! the saved parameters bit for bit.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{Hyperparameters, LearnerKind, TrainedModel};
use crate::pipeline::TextClassifier;
use crate::preprocess::PreprocessConfig;
use crate::vectorize::{TfidfConfig, Vocabulary};

pub const MAGIC: &str = "SAKHR";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub hyperparameters: Hyperparameters,
    /// See [`crate::corpus::Dataset::fingerprint`].
    pub dataset_fingerprint: String,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelArchive {
    pub magic: String,
    pub format_version: u64,
    pub preprocess_config: PreprocessConfig,
    pub tfidf_config: TfidfConfig,
    pub vocabulary: Vocabulary,
    pub learner_kind: LearnerKind,
    pub learner_params: TrainedModel,
    pub training_meta: TrainingMeta,
}

impl ModelArchive {
    pub fn new(classifier: TextClassifier, meta: TrainingMeta) -> Self {
        Self {
            magic: MAGIC.to_owned(),
            format_version: FORMAT_VERSION,
            preprocess_config: classifier.preprocess,
            tfidf_config: classifier.tfidf,
            vocabulary: classifier.vocabulary,
            learner_kind: classifier.model.kind(),
            learner_params: classifier.model,
            training_meta: meta,
        }
    }

    pub fn classifier(&self) -> TextClassifier {
        TextClassifier {
            preprocess: self.preprocess_config.clone(),
            tfidf: self.tfidf_config.clone(),
            vocabulary: self.vocabulary.clone(),
            model: self.learner_params.clone(),
        }
    }

    pub fn into_classifier(self) -> TextClassifier {
        TextClassifier {
            preprocess: self.preprocess_config,
            tfidf: self.tfidf_config,
            vocabulary: self.vocabulary,
            model: self.learner_params,
        }
    }

    fn validate(&self) -> Result<()> {
        self.vocabulary.validate()?;
        self.preprocess_config
            .validate()
            .map_err(|e| Error::Format(format!("preprocess_config: {e}")))?;
        if self.learner_params.kind() != self.learner_kind {
            return Err(Error::Format(format!(
                "learner_kind `{}` does not match parameters of `{}`",
                self.learner_kind,
                self.learner_params.kind()
            )));
        }
        if self.learner_params.n_features() != self.vocabulary.len() {
            return Err(Error::Format(format!(
                "model expects {} features but the vocabulary has {}",
                self.learner_params.n_features(),
                self.vocabulary.len()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
        self.serialize(&mut ser)
            .map_err(|e| Error::Format(format!("serialization failed: {e}")))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Err(Error::Format("empty model file".into()));
        }
        let value: serde_json::Value =
            serde_json::from_slice(bytes).map_err(|e| Error::Format(format!("not a JSON document: {e}")))?;
        if value.get("magic").and_then(|m| m.as_str()) != Some(MAGIC) {
            return Err(Error::Format(format!("missing `{MAGIC}` magic header")));
        }
        let version = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Format("missing format_version".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::Version {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let archive: ModelArchive =
            serde_json::from_value(value).map_err(|e| Error::Format(format!("malformed archive: {e}")))?;
        archive.validate()?;
        Ok(archive)
    }
}

pub fn save_model(archive: &ModelArchive, path: &Path) -> Result<()> {
    let bytes = archive.to_json()?;
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelArchive> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    ModelArchive::from_json(&bytes)
}

/// Compact JSON with floats in `d.dddddddddddddddde±x` form.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", f64::from(value))
    }
}
