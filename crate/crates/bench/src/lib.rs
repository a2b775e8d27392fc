//! Benchmarks over the bundled synthetic corpus.

use std::hint::black_box;
use std::path::{Path, PathBuf};

use criterion::{BenchmarkId, Criterion};

use sakhr_core::vectorize::{fit_transform, transform};
use sakhr_core::{fit, load_dataset, Dataset, LearnerKind, LearnerSpec, PreprocessConfig, Schema};

pub fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic_separable.csv")
}

pub fn fixture() -> Dataset {
    load_dataset(&fixture_path(), &Schema::default()).expect("bundled fixture loads")
}

fn tokenized(ds: &Dataset) -> Vec<Vec<String>> {
    let cfg = PreprocessConfig::default();
    ds.samples.iter().map(|s| cfg.tokens(&s.text)).collect()
}

pub fn preprocessing(c: &mut Criterion) {
    let ds = fixture();
    let cfg = PreprocessConfig::default();
    c.bench_function("clean/200 tweets", |b| {
        b.iter(|| {
            for s in &ds.samples {
                black_box(cfg.clean(black_box(&s.text)));
            }
        })
    });
}

pub fn vectorizing(c: &mut Criterion) {
    let docs = tokenized(&fixture());
    c.bench_function("tfidf/fit_transform 200 docs", |b| {
        b.iter(|| fit_transform(black_box(&docs)).unwrap())
    });
    let (vocab, _) = fit_transform(&docs).unwrap();
    c.bench_function("tfidf/transform 200 docs", |b| {
        b.iter(|| {
            for d in &docs {
                black_box(transform(black_box(d), &vocab));
            }
        })
    });
}

pub fn learners(c: &mut Criterion) {
    let ds = fixture();
    let (vocab, xs) = fit_transform(&tokenized(&ds)).unwrap();
    let ys = ds.labels();
    let mut group = c.benchmark_group("fit");
    group.sample_size(10);
    for kind in LearnerKind::ALL {
        let spec = LearnerSpec::new(kind, 7);
        group.bench_with_input(BenchmarkId::from_parameter(kind.name()), &spec, |b, spec| {
            b.iter(|| fit(spec, &xs, &ys, vocab.len()).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("predict/200 docs");
    for kind in LearnerKind::ALL {
        let model = fit(&LearnerSpec::new(kind, 7), &xs, &ys, vocab.len()).unwrap();
        group.bench_function(kind.name(), |b| b.iter(|| model.predict_batch(black_box(&xs)).unwrap()));
    }
    group.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    preprocessing(c);
    vectorizing(c);
    learners(c);
}
