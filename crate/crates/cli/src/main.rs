//! `sakhr`: preprocess, train, cross-validate, predict and evaluate
//! Arabic sarcasm classifiers over CSV datasets.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sakhr", version, about = "Arabic sarcasm detection with classical learners")]
pub struct Cli {
    /// Random seed for shuffling, fold assignment and learner initialization
    /// [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// TOML run configuration; command-line flags take precedence. Keys:
    /// seed, classifier, folds, [columns], [preprocess], [tfidf],
    /// [hyperparameters.<kind>]
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Suppress progress lines on stderr
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Emit reports as JSON instead of text tables
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ColumnArgs {
    /// Name of the text column [default: text]
    #[arg(long, value_name = "NAME")]
    pub text_column: Option<String>,

    /// Name of the label column [default: sarcastic]
    #[arg(long, value_name = "NAME")]
    pub label_column: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct PipelineArgs {
    /// Use idf + 1 and L2-normalized vectors instead of tf·ln((N+1)/(df+1))
    #[arg(long)]
    pub tfidf_compat: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean the text column of a CSV file, keeping every other column
    Preprocess {
        input: Option<PathBuf>,
        output: Option<PathBuf>,
        #[command(flatten)]
        columns: ColumnArgs,
        /// Print the effective preprocessing settings as TOML and exit
        #[arg(long)]
        show_config: bool,
    },
    /// Fit a classifier on a labelled CSV file and save it as a model archive
    Train {
        data: PathBuf,
        /// svm_linear, svm_rbf, mnb, sgd_hinge, mlp, random_forest, knn,
        /// adaboost or voting [default: voting]
        #[arg(long)]
        classifier: Option<String>,
        /// Output path of the model archive
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[command(flatten)]
        columns: ColumnArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Stratified k-fold cross-validation report (accuracy and STD)
    Cv {
        data: PathBuf,
        /// A classifier kind, or `all` for the eight learners plus voting
        /// [default: all]
        #[arg(long)]
        classifier: Option<String>,
        /// Number of folds [default: 5]
        #[arg(long)]
        folds: Option<usize>,
        #[command(flatten)]
        columns: ColumnArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Label each row of a CSV file; a `predicted` column is appended
    Predict {
        /// Model archive written by `train`
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        input: PathBuf,
        /// Output CSV [default: stdout]
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Name of the text column [default: text]
        #[arg(long, value_name = "NAME")]
        text_column: Option<String>,
    },
    /// Score predictions against gold labels (F-1 sarcastic, F-score,
    /// Precision, Recall, Accuracy)
    Evaluate {
        /// CSV with a `predicted` column
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        /// CSV with gold labels, row-aligned with --pred; defaults to the
        /// label column of the --pred file
        #[arg(long, value_name = "FILE")]
        gold: Option<PathBuf>,
        /// Name of the gold label column [default: sarcastic]
        #[arg(long, value_name = "NAME")]
        label_column: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
