//! Run configuration: TOML file values overridden by command-line flags.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use sakhr_core::{Hyperparameters, LearnerKind, PipelineConfig, PreprocessConfig, Schema, TfidfConfig};

use crate::error::{CliError, Stage};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FOLDS: usize = 5;

/// Contents of a `--config` file. Every key is optional; unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub classifier: Option<String>,
    pub folds: Option<usize>,
    pub columns: Schema,
    pub preprocess: PreprocessConfig,
    pub tfidf: TfidfConfig,
    pub hyperparameters: Hyperparameters,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::new(
                Stage::Config,
                sakhr_core::Error::Io {
                    path: path.into(),
                    source: e,
                },
            )
        })?;
        Self::parse(&text).map_err(|msg| CliError::config(format!("{}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let config: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        config.preprocess.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            preprocess: self.preprocess.clone(),
            tfidf: self.tfidf.clone(),
        }
    }
}

/// A classifier selection: one kind or all nine report rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    One(LearnerKind),
    All,
}

impl Selection {
    pub fn parse(raw: &str) -> Result<Self, CliError> {
        if raw.eq_ignore_ascii_case("all") {
            return Ok(Selection::All);
        }
        raw.parse().map(Selection::One).map_err(|_| {
            let names: Vec<&str> = LearnerKind::ALL.iter().map(|k| k.name()).collect();
            CliError::config(format!(
                "unknown classifier `{raw}` (expected one of: {}, all)",
                names.join(", ")
            ))
        })
    }

    pub fn kinds(self) -> Vec<LearnerKind> {
        match self {
            Selection::One(k) => vec![k],
            Selection::All => LearnerKind::ALL.to_vec(),
        }
    }
}
