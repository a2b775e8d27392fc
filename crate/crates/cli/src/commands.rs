use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use sakhr_core::corpus::parse_label;
use sakhr_core::evaluation::{cross_validate, cv_table, evaluate};
use sakhr_core::{
    learners, load_dataset, load_model, save_model, vectorize, Dataset, Error, Label, LearnerKind, LearnerSpec,
    ModelArchive, PipelineConfig, Schema, Table, TextClassifier, TrainingMeta,
};

use crate::config::{RunConfig, Selection, DEFAULT_FOLDS, DEFAULT_SEED};
use crate::error::{CliError, Stage, StageExt};
use crate::{Cli, ColumnArgs, Command, PipelineArgs};

pub const PREDICTED_COLUMN: &str = "predicted";

struct Context {
    config: RunConfig,
    seed: u64,
    quiet: bool,
    json: bool,
}

impl Context {
    fn info(&self, message: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", message.as_ref());
        }
    }

    fn schema(&self, columns: &ColumnArgs) -> Schema {
        let mut schema = self.config.columns.clone();
        if let Some(t) = &columns.text_column {
            schema.text = t.clone();
        }
        if let Some(l) = &columns.label_column {
            schema.label = l.clone();
        }
        schema
    }

    fn pipeline(&self, args: &PipelineArgs) -> PipelineConfig {
        let mut p = self.config.pipeline();
        p.tfidf.compat_mode |= args.tfidf_compat;
        p
    }

    fn selection(&self, flag: &Option<String>, default: &str) -> Result<Selection, CliError> {
        let raw = flag.as_deref().or(self.config.classifier.as_deref()).unwrap_or(default);
        Selection::parse(raw)
    }

    fn spec(&self, kind: LearnerKind) -> LearnerSpec {
        LearnerSpec::new(kind, self.seed).with_hyperparameters(self.config.hyperparameters.clone())
    }

    /// Writes a report to stdout, as JSON when `--json` is set.
    fn report<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<(), CliError> {
        let out = if self.json {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
            s.push('\n');
            s
        } else {
            text()
        };
        write_stdout(out.as_bytes())
    }
}

fn write_stdout(bytes: &[u8]) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(bytes)
        .and_then(|()| out.flush())
        .map_err(|e| io_error("<stdout>", e))
}

fn io_error(path: impl Into<PathBuf>, source: io::Error) -> CliError {
    CliError::new(
        Stage::Write,
        Error::Io {
            path: path.into(),
            source,
        },
    )
}

fn write_table(table: &Table, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => table.write(p).stage(Stage::Write),
        None => {
            let mut buf = Vec::new();
            table.to_writer(&mut buf).stage(Stage::Write)?;
            write_stdout(&buf)
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Context {
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        config,
        quiet: cli.quiet,
        json: cli.json,
    };
    match &cli.command {
        Command::Preprocess {
            input,
            output,
            columns,
            show_config,
        } => {
            if *show_config {
                #[derive(Serialize)]
                struct Section<'a> {
                    preprocess: &'a sakhr_core::PreprocessConfig,
                }
                let section = Section {
                    preprocess: &ctx.config.preprocess,
                };
                let text = toml::to_string(&section).expect("preprocess settings serialize to TOML");
                return write_stdout(text.as_bytes());
            }
            let input = input
                .as_deref()
                .ok_or_else(|| CliError::config("preprocess needs an input file"))?;
            preprocess(&ctx, input, output.as_deref(), columns)
        }
        Command::Train {
            data,
            classifier,
            model,
            columns,
            pipeline,
        } => train(&ctx, data, classifier, model, columns, pipeline),
        Command::Cv {
            data,
            classifier,
            folds,
            columns,
            pipeline,
        } => {
            let folds = folds.or(ctx.config.folds).unwrap_or(DEFAULT_FOLDS);
            cv(&ctx, data, classifier, folds, columns, pipeline)
        }
        Command::Predict {
            model,
            input,
            output,
            text_column,
        } => predict(&ctx, model, input, output.as_deref(), text_column),
        Command::Evaluate {
            pred,
            gold,
            label_column,
        } => evaluate_files(&ctx, pred, gold.as_deref(), label_column),
    }
}

#[derive(Serialize)]
struct PreprocessSummary {
    rows: usize,
    /// 1-based data rows whose text is empty after cleaning.
    empty_after_clean: Vec<usize>,
}

fn preprocess(ctx: &Context, input: &Path, output: Option<&Path>, columns: &ColumnArgs) -> Result<(), CliError> {
    let mut table = Table::read(input).stage(Stage::Load)?;
    let col = table.require_column(&ctx.schema(columns).text).stage(Stage::Load)?;
    let cfg = &ctx.config.preprocess;
    let mut empty = Vec::new();
    for (i, row) in table.rows.iter_mut().enumerate() {
        row[col] = cfg.clean(&row[col]);
        if row[col].is_empty() {
            empty.push(i + 1);
        }
    }
    write_table(&table, output)?;
    for row in &empty {
        eprintln!("warning: row {row}: text is empty after cleaning");
    }
    ctx.info(format!("cleaned {} rows", table.rows.len()));
    if output.is_some() && ctx.json {
        let summary = PreprocessSummary {
            rows: table.rows.len(),
            empty_after_clean: empty,
        };
        ctx.report(&summary, String::new)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    model: &'a Path,
    classifier: LearnerKind,
    n_samples: usize,
    vocabulary_size: usize,
    dataset_fingerprint: &'a str,
    seed: u64,
}

fn train(
    ctx: &Context,
    data: &Path,
    classifier: &Option<String>,
    model_path: &Path,
    columns: &ColumnArgs,
    pipeline: &PipelineArgs,
) -> Result<(), CliError> {
    let kind = match ctx.selection(classifier, LearnerKind::Voting.name())? {
        Selection::One(k) => k,
        Selection::All => return Err(CliError::config("train needs a single classifier, not `all`")),
    };
    let dataset = load_dataset(data, &ctx.schema(columns)).stage(Stage::Load)?;
    let config = ctx.pipeline(pipeline);
    config.preprocess.validate().stage(Stage::Preprocess)?;
    let docs: Vec<Vec<String>> = dataset
        .samples
        .iter()
        .map(|s| config.preprocess.tokens(&s.text))
        .collect();
    let (vocabulary, vectors) = vectorize::fit_transform_with(&docs, &config.tfidf).stage(Stage::Vectorize)?;
    ctx.info(format!(
        "fitting {kind} on {} samples, {} features",
        dataset.len(),
        vocabulary.len()
    ));
    let spec = ctx.spec(kind);
    let model = learners::fit(&spec, &vectors, &dataset.labels(), vocabulary.len()).stage(Stage::Fit)?;
    let fingerprint = dataset.fingerprint();
    let vocabulary_size = vocabulary.len();
    let archive = ModelArchive::new(
        TextClassifier {
            preprocess: config.preprocess,
            tfidf: config.tfidf,
            vocabulary,
            model,
        },
        TrainingMeta {
            seed: ctx.seed,
            hyperparameters: spec.hyperparameters,
            dataset_fingerprint: fingerprint.clone(),
            n_samples: dataset.len(),
        },
    );
    save_model(&archive, model_path).stage(Stage::Save)?;
    ctx.info(format!("saved model to {}", model_path.display()));
    if ctx.json {
        let summary = TrainSummary {
            model: model_path,
            classifier: kind,
            n_samples: dataset.len(),
            vocabulary_size,
            dataset_fingerprint: &fingerprint,
            seed: ctx.seed,
        };
        ctx.report(&summary, String::new)?;
    }
    Ok(())
}

fn cv(
    ctx: &Context,
    data: &Path,
    classifier: &Option<String>,
    folds: usize,
    columns: &ColumnArgs,
    pipeline: &PipelineArgs,
) -> Result<(), CliError> {
    let kinds = ctx.selection(classifier, "all")?.kinds();
    let dataset: Dataset = load_dataset(data, &ctx.schema(columns)).stage(Stage::Load)?;
    let config = ctx.pipeline(pipeline);
    ctx.info(format!(
        "{folds}-fold cross-validation of {} classifier(s) on {} samples",
        kinds.len(),
        dataset.len()
    ));
    // Every classifier sees the same folds; kinds run concurrently and
    // results keep the requested order.
    let reports = kinds
        .par_iter()
        .map(|&kind| {
            cross_validate(&ctx.spec(kind), &config, &dataset, folds, ctx.seed)
                .map_err(|e| CliError::new(Stage::CrossValidate, e).with_context(kind.name()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ctx.report(&reports, || cv_table(&reports))
}

fn predict(
    ctx: &Context,
    model_path: &Path,
    input: &Path,
    output: Option<&Path>,
    text_column: &Option<String>,
) -> Result<(), CliError> {
    let archive = load_model(model_path).stage(Stage::Load)?;
    let classifier = archive.into_classifier();
    let mut table = Table::read(input).stage(Stage::Load)?;
    let text_col_name = text_column.clone().unwrap_or_else(|| ctx.config.columns.text.clone());
    let text_col = table.require_column(&text_col_name).stage(Stage::Load)?;
    let labels = table
        .rows
        .iter()
        .map(|row| classifier.predict(&row[text_col]))
        .collect::<Result<Vec<Label>, Error>>()
        .stage(Stage::Predict)?;
    let out_col = match table.column(PREDICTED_COLUMN) {
        Some(c) => c,
        None => {
            table.headers.push(PREDICTED_COLUMN.to_owned());
            for row in &mut table.rows {
                row.push(String::new());
            }
            table.headers.len() - 1
        }
    };
    for (row, y) in table.rows.iter_mut().zip(&labels) {
        row[out_col] = y.to_string();
    }
    write_table(&table, output)?;
    let positives = labels.iter().filter(|&&y| y == 1).count();
    ctx.info(format!("predicted {} rows ({positives} sarcastic)", labels.len()));
    Ok(())
}

fn label_column(table: &Table, column: &str) -> Result<Vec<Label>, Error> {
    let col = table.require_column(column)?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            parse_label(&row[col]).ok_or_else(|| Error::Row {
                row: i + 1,
                message: format!("unparseable label `{}` in column `{column}`", row[col]),
            })
        })
        .collect()
}

fn evaluate_files(
    ctx: &Context,
    pred_path: &Path,
    gold_path: Option<&Path>,
    label_flag: &Option<String>,
) -> Result<(), CliError> {
    let pred_table = Table::read(pred_path).stage(Stage::Load)?;
    let pred = label_column(&pred_table, PREDICTED_COLUMN).stage(Stage::Evaluate)?;
    let gold_column = label_flag.clone().unwrap_or_else(|| ctx.config.columns.label.clone());
    let gold = match gold_path {
        Some(p) => label_column(&Table::read(p).stage(Stage::Load)?, &gold_column),
        None => label_column(&pred_table, &gold_column),
    }
    .stage(Stage::Evaluate)?;
    let report = evaluate(&gold, &pred).stage(Stage::Evaluate)?;
    ctx.report(&report, || report.to_table())
}
