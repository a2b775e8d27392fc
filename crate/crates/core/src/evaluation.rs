//! Confusion counts, F1 metrics, stratified k-fold splits and
//! cross-validation reports. The positive class is sarcastic (label 1).

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::learners::{Label, LearnerKind, LearnerSpec};
use crate::pipeline::{PipelineConfig, TextClassifier};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion(gold: &[Label], pred: &[Label]) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::Shape {
            expected: gold.len(),
            actual: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::input("cannot score zero predictions"));
    }
    let mut cm = ConfusionMatrix::default();
    for (&g, &p) in gold.iter().zip(pred) {
        match (g, p) {
            (1, 1) => cm.tp += 1,
            (0, 1) => cm.fp += 1,
            (1, 0) => cm.fn_ += 1,
            (0, 0) => cm.tn += 1,
            _ => {
                return Err(Error::input(format!(
                    "labels must be 0 or 1, got gold {g} / predicted {p}"
                )))
            }
        }
    }
    Ok(cm)
}

/// Harmonic mean `2PR / (P + R)`, zero when `P + R = 0`.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision_sarcastic: f64,
    pub recall_sarcastic: f64,
    pub f1_sarcastic: f64,
    /// `[F1 of class 0, F1 of class 1]`.
    pub f1_per_class: [f64; 2],
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// Ratios whose denominator was zero and were reported as 0.
    pub zero_division: Vec<String>,
}

fn ratio(num: usize, den: usize, name: &str, flags: &mut Vec<String>) -> f64 {
    if den == 0 {
        flags.push(name.to_owned());
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let mut flags = Vec::new();
    let total = cm.total();
    let accuracy = ratio(cm.tp + cm.tn, total, "accuracy", &mut flags);
    let p1 = ratio(cm.tp, cm.tp + cm.fp, "precision_sarcastic", &mut flags);
    let r1 = ratio(cm.tp, cm.tp + cm.fn_, "recall_sarcastic", &mut flags);
    let p0 = ratio(cm.tn, cm.tn + cm.fn_, "precision_non_sarcastic", &mut flags);
    let r0 = ratio(cm.tn, cm.tn + cm.fp, "recall_non_sarcastic", &mut flags);
    let f1_per_class = [f1(p0, r0), f1(p1, r1)];
    MetricsReport {
        confusion: *cm,
        accuracy,
        precision_sarcastic: p1,
        recall_sarcastic: r1,
        f1_sarcastic: f1_per_class[1],
        f1_per_class,
        macro_precision: (p0 + p1) / 2.0,
        macro_recall: (r0 + r1) / 2.0,
        macro_f1: (f1_per_class[0] + f1_per_class[1]) / 2.0,
        zero_division: flags,
    }
}

pub fn evaluate(gold: &[Label], pred: &[Label]) -> Result<MetricsReport> {
    Ok(metrics(&confusion(gold, pred)?))
}

/// Measure names of the test-set report, in order.
pub const TEST_REPORT_MEASURES: [&str; 5] = ["F-1 sarcastic", "F-score", "Precision", "Recall", "Accuracy"];

impl MetricsReport {
    /// `(measure, value)` rows: F1 of the sarcastic class, macro F1,
    /// sarcastic precision and recall, accuracy.
    pub fn rows(&self) -> [(&'static str, f64); 5] {
        let values = [
            self.f1_sarcastic,
            self.macro_f1,
            self.precision_sarcastic,
            self.recall_sarcastic,
            self.accuracy,
        ];
        let mut out = [("", 0.0); 5];
        for (o, (name, v)) in out.iter_mut().zip(TEST_REPORT_MEASURES.iter().zip(values)) {
            *o = (name, v);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("{:<15} {:>6}\n", "Measure", "Value");
        for (name, v) in self.rows() {
            let _ = writeln!(s, "{name:<15} {v:>6.4}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified k-fold split. Each class is shuffled with `seed` and dealt
/// round-robin over the folds, continuing the deal across classes so fold
/// sizes stay balanced. Index lists are sorted.
pub fn kfold_split(n: usize, k: usize, labels: &[Label], seed: u64) -> Result<Vec<Fold>> {
    if labels.len() != n {
        return Err(Error::Shape {
            expected: n,
            actual: labels.len(),
        });
    }
    if k < 2 || k > n {
        return Err(Error::Split(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = crate::seed::rng(seed);
    let mut tests: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut dealt = 0;
    for class in [0, 1] {
        let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::Split(format!(
                "class {class} has {} samples, fewer than k = {k}",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            tests[dealt % k].push(i);
            dealt += 1;
        }
    }
    if dealt != n {
        return Err(Error::Split("labels must be 0 or 1".into()));
    }
    Ok(tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; n];
            test.iter().for_each(|&i| in_test[i] = true);
            let train = (0..n).filter(|&i| !in_test[i]).collect();
            Fold { train, test }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub classifier_kind: LearnerKind,
    pub per_fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    /// Population standard deviation over folds.
    pub std_accuracy: f64,
}

impl CvReport {
    pub fn from_folds(classifier_kind: LearnerKind, per_fold_accuracy: Vec<f64>) -> Self {
        let (mean_accuracy, std_accuracy) = mean_std(&per_fold_accuracy);
        Self {
            classifier_kind,
            per_fold_accuracy,
            mean_accuracy,
            std_accuracy,
        }
    }
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Text table with one row per report: classifier, accuracy in percent,
/// standard deviation.
pub fn cv_table(reports: &[CvReport]) -> String {
    let mut s = format!("{:<12} {:>8} {:>6}\n", "Classifier", "Accuracy", "STD");
    for r in reports {
        let _ = writeln!(
            s,
            "{:<12} {:>7.1}% {:>6.3}",
            r.classifier_kind.display_name(),
            r.mean_accuracy * 100.0,
            r.std_accuracy
        );
    }
    s
}

/// Outcome of one fold.
#[derive(Debug, Clone)]
pub struct FoldOutcome<T> {
    pub fold: Fold,
    pub predictions: Vec<Label>,
    pub accuracy: f64,
    pub artifact: T,
}

/// Runs `fit_predict(train, test)` on every stratified fold. The callback
/// returns predictions for `test` (in order) plus any artifact the caller
/// wants back. Folds run concurrently; results come back in fold order.
pub fn cross_validate_with<T, F>(labels: &[Label], k: usize, seed: u64, fit_predict: F) -> Result<Vec<FoldOutcome<T>>>
where
    T: Send,
    F: Fn(&[usize], &[usize]) -> Result<(Vec<Label>, T)> + Sync,
{
    let folds = kfold_split(labels.len(), k, labels, seed)?;
    folds
        .into_par_iter()
        .map(|fold| {
            let (predictions, artifact) = fit_predict(&fold.train, &fold.test)?;
            if predictions.len() != fold.test.len() {
                return Err(Error::Shape {
                    expected: fold.test.len(),
                    actual: predictions.len(),
                });
            }
            let hits = fold
                .test
                .iter()
                .zip(&predictions)
                .filter(|(&i, &p)| labels[i] == p)
                .count();
            let accuracy = hits as f64 / fold.test.len() as f64;
            Ok(FoldOutcome {
                fold,
                predictions,
                accuracy,
                artifact,
            })
        })
        .collect()
}

/// Full text pipeline per fold: cleaning, vocabulary and model are fitted
/// on the training split only. Returns each fold's fitted classifier.
pub fn cross_validate_folds(
    spec: &LearnerSpec,
    config: &PipelineConfig,
    dataset: &Dataset,
    k: usize,
    seed: u64,
) -> Result<Vec<FoldOutcome<TextClassifier>>> {
    let labels = dataset.labels();
    let texts: Vec<&str> = dataset.samples.iter().map(|s| s.text.as_str()).collect();
    cross_validate_with(&labels, k, seed, |train, test| {
        let train_texts: Vec<&str> = train.iter().map(|&i| texts[i]).collect();
        let train_labels: Vec<Label> = train.iter().map(|&i| labels[i]).collect();
        let model = TextClassifier::fit(spec, config, &train_texts, &train_labels)?;
        let test_texts: Vec<&str> = test.iter().map(|&i| texts[i]).collect();
        let preds = model.predict_batch(&test_texts)?;
        Ok((preds, model))
    })
}

pub fn cross_validate(
    spec: &LearnerSpec,
    config: &PipelineConfig,
    dataset: &Dataset,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    let folds = cross_validate_folds(spec, config, dataset, k, seed)?;
    Ok(CvReport::from_folds(
        spec.kind,
        folds.iter().map(|f| f.accuracy).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn confusion_counts() {
        let cm = confusion(&[1, 1, 0], &[1, 0, 0]).unwrap();
        assert_eq!(
            cm,
            ConfusionMatrix {
                tp: 1,
                fp: 0,
                fn_: 1,
                tn: 1
            }
        );
        let gold = [1, 0, 1, 1, 0];
        let same = confusion(&gold, &gold).unwrap();
        assert_eq!((same.fp, same.fn_), (0, 0));
        let flipped: Vec<Label> = gold.iter().map(|y| 1 - y).collect();
        let cm = confusion(&gold, &flipped).unwrap();
        assert_eq!((cm.tp, cm.tn), (0, 0));
        assert!(matches!(confusion(&[1], &[1, 0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn f1_values() {
        assert_eq!(f1(0.5, 0.5), 0.5);
        assert!((f1(0.75, 0.6) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f1(1.0, 0.0), 0.0);
        assert_eq!(f1(0.0, 0.0), 0.0);
    }

    #[test]
    fn metrics_examples() {
        let m = metrics(&ConfusionMatrix {
            tp: 1,
            fp: 0,
            fn_: 1,
            tn: 1,
        });
        assert!((m.accuracy - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.precision_sarcastic, 1.0);
        assert_eq!(m.recall_sarcastic, 0.5);
        assert!((m.f1_sarcastic - 2.0 / 3.0).abs() < 1e-15);

        let perfect = evaluate(&[1, 0, 1], &[1, 0, 1]).unwrap();
        assert_eq!(perfect.rows().map(|r| r.1), [1.0; 5]);
        assert!(perfect.zero_division.is_empty());

        let negative = evaluate(&[1, 0, 1], &[0, 0, 0]).unwrap();
        assert_eq!(negative.f1_sarcastic, 0.0);
        assert_eq!(negative.zero_division, vec!["precision_sarcastic"]);
    }

    #[test]
    fn table_has_the_five_measures() {
        let table = evaluate(&[1, 0], &[1, 1]).unwrap().to_table();
        let names: Vec<&str> = table
            .lines()
            .skip(1)
            .map(|l| l.rsplit_once(' ').unwrap().0.trim())
            .collect();
        assert_eq!(names, TEST_REPORT_MEASURES);
    }

    #[test]
    fn cv_stats() {
        let r = CvReport::from_folds(LearnerKind::Mlp, vec![0.8; 5]);
        assert!((r.mean_accuracy - 0.8).abs() < 1e-15 && r.std_accuracy < 1e-15);
        let r = CvReport::from_folds(LearnerKind::Mlp, vec![1.0, 0.0]);
        assert_eq!((r.mean_accuracy, r.std_accuracy), (0.5, 0.5));
        let r = CvReport::from_folds(LearnerKind::Mlp, vec![0.836, 0.836]);
        assert_eq!(cv_table(&[r]).lines().nth(1).unwrap(), "MLP             83.6%  0.000");
    }

    #[test]
    fn folds_partition_and_stratify() {
        let labels: Vec<Label> = (0..10).map(|i| (i % 2) as Label).collect();
        let folds = kfold_split(10, 5, &labels, 1).unwrap();
        let mut all: Vec<usize> = folds.iter().flat_map(|f| f.test.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert!(folds.iter().all(|f| f.test.len() == 2 && f.train.len() == 8));

        let labels: Vec<Label> = (0..20).map(|i| Label::from(i < 8)).collect();
        for f in kfold_split(20, 5, &labels, 9).unwrap() {
            let pos = f.test.iter().filter(|&&i| labels[i] == 1).count();
            let neg = f.test.len() - pos;
            assert!((1..=2).contains(&pos) && (2..=3).contains(&neg), "{pos}/{neg}");
        }
    }

    #[test]
    fn split_preconditions() {
        assert!(matches!(kfold_split(5, 5, &[1, 1, 1, 0, 0], 0), Err(Error::Split(_))));
        assert!(matches!(kfold_split(3, 5, &[1, 0, 1], 0), Err(Error::Split(_))));
        assert!(matches!(kfold_split(4, 1, &[1, 0, 1, 0], 0), Err(Error::Split(_))));
    }

    #[test]
    fn metrics_match_recount() {
        let mut rng = crate::seed::rng(17);
        for _ in 0..200 {
            let n = rng.gen_range(1..200);
            let gold: Vec<Label> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
            let pred: Vec<Label> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
            let m = evaluate(&gold, &pred).unwrap();
            let hits = gold.iter().zip(&pred).filter(|(a, b)| a == b).count();
            assert_eq!(m.accuracy, hits as f64 / n as f64);
            let tp = gold.iter().zip(&pred).filter(|(&a, &b)| a == 1 && b == 1).count();
            let predicted_pos = pred.iter().filter(|&&b| b == 1).count();
            let expected_p = if predicted_pos == 0 {
                0.0
            } else {
                tp as f64 / predicted_pos as f64
            };
            assert_eq!(m.precision_sarcastic, expected_p);
        }
    }

    #[test]
    fn constant_classifier_cv() {
        // 12 non-sarcastic / 8 sarcastic; every training split keeps class 0
        // in the majority, so each fold predicts 0 everywhere.
        let labels: Vec<Label> = (0..20).map(|i| Label::from(i % 5 < 2)).collect();
        let out = cross_validate_with(&labels, 5, 3, |train, test| {
            let ones = train.iter().filter(|&&i| labels[i] == 1).count();
            let majority = Label::from(2 * ones > train.len());
            Ok((vec![majority; test.len()], ()))
        })
        .unwrap();
        // Each test fold holds 2 or 3 zeros out of 4; the deal hands out
        // zeros first so folds get (3,1),(3,1),(2,2),(2,2),(2,2).
        let mut acc: Vec<f64> = out.iter().map(|o| o.accuracy).collect();
        acc.sort_by(f64::total_cmp);
        assert_eq!(acc, vec![0.5, 0.5, 0.5, 0.75, 0.75]);
        let report = CvReport::from_folds(LearnerKind::Mnb, out.iter().map(|o| o.accuracy).collect());
        assert!((report.mean_accuracy - 0.6).abs() < 1e-15);
        // population STD of {.5,.5,.5,.75,.75} = sqrt(0.015)
        assert!((report.std_accuracy - 0.015f64.sqrt()).abs() < 1e-15);
    }
}
