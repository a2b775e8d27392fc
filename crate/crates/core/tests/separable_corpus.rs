use std::path::{Path, PathBuf};
use std::time::Instant;

use sakhr_core::evaluation::cross_validate;
use sakhr_core::{
    load_dataset, load_model, save_model, stratified_shuffle, Dataset, Hyperparameters, LearnerKind, LearnerSpec,
    ModelArchive, PipelineConfig, Schema, TextClassifier, TrainingMeta,
};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic_separable.csv")
}

fn dataset() -> Dataset {
    load_dataset(&fixture(), &Schema::default()).unwrap()
}

#[test]
fn fixture_shape() {
    let ds = dataset();
    assert_eq!(ds.len(), 200);
    let ones = ds.labels().iter().filter(|&&y| y == 1).count();
    assert_eq!(ones, 80);
}

#[test]
fn every_learner_separates_the_fixture() {
    let ds = dataset();
    for kind in LearnerKind::ALL {
        let start = Instant::now();
        let report = cross_validate(&LearnerSpec::new(kind, 7), &PipelineConfig::default(), &ds, 5, 7).unwrap();
        eprintln!("{kind}: {:?} {:.2?}", report.per_fold_accuracy, start.elapsed());
        assert!(report.mean_accuracy >= 0.95, "{kind}: {}", report.mean_accuracy);
    }
}

#[test]
fn archive_round_trip_on_fixture_tweets() {
    let ds = dataset();
    let dir = tempfile::tempdir().unwrap();
    let probe: Vec<&str> = ds.texts().into_iter().step_by(10).collect();
    assert_eq!(probe.len(), 20);
    for kind in [
        LearnerKind::SvmRbf,
        LearnerKind::Mlp,
        LearnerKind::RandomForest,
        LearnerKind::Voting,
    ] {
        let clf = TextClassifier::fit(
            &LearnerSpec::new(kind, 1),
            &PipelineConfig::default(),
            &ds.texts(),
            &ds.labels(),
        )
        .unwrap();
        let expected = clf.predict_batch(&probe).unwrap();
        let meta = TrainingMeta {
            seed: 1,
            hyperparameters: Hyperparameters::default(),
            dataset_fingerprint: ds.fingerprint(),
            n_samples: ds.len(),
        };
        let path = dir.path().join(format!("{kind}.json"));
        save_model(&ModelArchive::new(clf, meta), &path).unwrap();
        let loaded = load_model(&path).unwrap().into_classifier();
        assert_eq!(loaded.predict_batch(&probe).unwrap(), expected, "{kind}");
    }
}

#[test]
fn shuffled_fixture_keeps_its_samples() {
    let ds = dataset();
    let shuffled = stratified_shuffle(&ds, 42);
    assert_eq!(shuffled.texts(), stratified_shuffle(&ds, 42).texts());
    assert_ne!(shuffled.texts(), ds.texts());
    let mut a = ds.texts();
    let mut b = shuffled.texts();
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, b);
}
