use std::fmt;
use std::process::ExitCode;

use sakhr_core::Error;

/// Pipeline stage an error came from; printed in front of the message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Preprocess,
    Vectorize,
    Fit,
    CrossValidate,
    Save,
    Predict,
    Evaluate,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Preprocess => "preprocess",
            Stage::Vectorize => "vectorize",
            Stage::Fit => "fit",
            Stage::CrossValidate => "cross-validation",
            Stage::Save => "save",
            Stage::Predict => "predict",
            Stage::Evaluate => "evaluate",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug)]
pub struct CliError {
    pub stage: Stage,
    pub source: Error,
    /// What was being processed, e.g. the classifier kind.
    pub context: Option<String>,
}

impl CliError {
    pub fn new(stage: Stage, source: Error) -> Self {
        Self {
            stage,
            source,
            context: None,
        }
    }

    pub fn with_context(mut self, context: impl Into<String>) -> Self {
        self.context = Some(context.into());
        self
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Stage::Config, Error::Config(message.into()))
    }

    /// 3 I/O, 4 dataset schema or row, 5 model file format, 6 model file
    /// version, 7 fitting or prediction input, 8 configuration.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self.source {
            Error::Io { .. } => 3,
            Error::Csv(_) | Error::MissingColumn { .. } | Error::Row { .. } => 4,
            Error::Format(_) => 5,
            Error::Version { .. } => 6,
            Error::Fit(_) | Error::Input(_) | Error::Split(_) | Error::Shape { .. } => 7,
            Error::Config(_) => 8,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.context {
            Some(c) => write!(f, "{} failed ({c}): {}", self.stage, self.source),
            None => write!(f, "{} failed: {}", self.stage, self.source),
        }
    }
}

pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, CliError>;
}

impl<T> StageExt<T> for Result<T, Error> {
    fn stage(self, stage: Stage) -> Result<T, CliError> {
        self.map_err(|e| CliError::new(stage, e))
    }
}
