//! Unigram vocabulary and TF-IDF weighting.
//!
//! A token `w` in a document gets weight `tf · ln((N + 1) / (df + 1))`, where
//! `tf` is its raw count in the document, `df` the number of training
//! documents containing it and `N` the number of training documents. No
//! constant is added to the idf and vectors are not normalized unless
//! [`TfidfConfig::compat_mode`] is set.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TfidfConfig {
    /// Use `idf + 1` and L2-normalize each vector.
    pub compat_mode: bool,
    /// Drop tokens seen in fewer than this many training documents.
    pub min_df: usize,
    /// Drop tokens seen in more than this many training documents.
    pub max_df: Option<usize>,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        Self {
            compat_mode: false,
            min_df: 1,
            max_df: None,
        }
    }
}

/// Token to index map with per-token document frequencies. Tokens are
/// indexed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    tokens: Vec<String>,
    document_frequency: Vec<usize>,
    n_documents: usize,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    tokens: Vec<String>,
    document_frequency: Vec<usize>,
    n_documents: usize,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(r: VocabularyRepr) -> Self {
        Vocabulary::from_parts(r.tokens, r.document_frequency, r.n_documents)
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            tokens: v.tokens,
            document_frequency: v.document_frequency,
            n_documents: v.n_documents,
        }
    }
}

impl Vocabulary {
    fn from_parts(tokens: Vec<String>, document_frequency: Vec<usize>, n_documents: usize) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self {
            tokens,
            document_frequency,
            n_documents,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn document_frequency(&self, index: usize) -> usize {
        self.document_frequency[index]
    }

    pub fn document_frequencies(&self) -> &[usize] {
        &self.document_frequency
    }

    /// Structural checks for a deserialized vocabulary.
    pub fn validate(&self) -> Result<()> {
        if self.tokens.len() != self.document_frequency.len() {
            return Err(Error::Format(format!(
                "vocabulary has {} tokens but {} document frequencies",
                self.tokens.len(),
                self.document_frequency.len()
            )));
        }
        if self.index.len() != self.tokens.len() {
            return Err(Error::Format("vocabulary contains duplicate tokens".into()));
        }
        if let Some(df) = self
            .document_frequency
            .iter()
            .find(|&&df| df == 0 || df > self.n_documents)
        {
            return Err(Error::Format(format!(
                "document frequency {df} outside [1, {}]",
                self.n_documents
            )));
        }
        Ok(())
    }
}

/// Fits a vocabulary over tokenized documents, keeping every token.
pub fn fit_vocabulary<S: AsRef<str>>(documents: &[Vec<S>]) -> Result<Vocabulary> {
    fit_vocabulary_with(documents, &TfidfConfig::default())
}

pub fn fit_vocabulary_with<S: AsRef<str>>(documents: &[Vec<S>], config: &TfidfConfig) -> Result<Vocabulary> {
    if documents.is_empty() {
        return Err(Error::fit("cannot fit a vocabulary on zero documents"));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in documents {
        let mut seen: Vec<&str> = doc.iter().map(AsRef::as_ref).collect();
        seen.sort_unstable();
        seen.dedup();
        for token in seen {
            *df.entry(token).or_default() += 1;
        }
    }
    if df.is_empty() {
        return Err(Error::fit("corpus contains no tokens"));
    }
    let max_df = config.max_df.unwrap_or(usize::MAX);
    let (tokens, freqs): (Vec<String>, Vec<usize>) = df
        .into_iter()
        .filter(|&(_, d)| d >= config.min_df && d <= max_df)
        .map(|(t, d)| (t.to_owned(), d))
        .unzip();
    if tokens.is_empty() {
        return Err(Error::fit("document-frequency pruning removed every token"));
    }
    Ok(Vocabulary::from_parts(tokens, freqs, documents.len()))
}

/// `ln((N + 1) / (df + 1))`.
pub fn idf(document_frequency: usize, n_documents: usize) -> f64 {
    ((n_documents as f64 + 1.0) / (document_frequency as f64 + 1.0)).ln()
}

/// TF-IDF vector of one tokenized document. Out-of-vocabulary tokens are
/// ignored and zero weights are not stored.
pub fn transform<S: AsRef<str>>(document: &[S], vocab: &Vocabulary) -> SparseVector {
    transform_with(document, vocab, &TfidfConfig::default())
}

pub fn transform_with<S: AsRef<str>>(document: &[S], vocab: &Vocabulary, config: &TfidfConfig) -> SparseVector {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for token in document {
        if let Some(i) = vocab.index_of(token.as_ref()) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let offset = if config.compat_mode { 1.0 } else { 0.0 };
    let mut v = SparseVector::from_pairs(counts.into_iter().map(|(i, tf)| {
        let w = tf as f64 * (idf(vocab.document_frequency(i), vocab.n_documents()) + offset);
        (i, w)
    }));
    if config.compat_mode {
        let norm = v.norm();
        if norm > 0.0 {
            v.scale(1.0 / norm);
        }
    }
    v
}

pub fn fit_transform<S: AsRef<str>>(documents: &[Vec<S>]) -> Result<(Vocabulary, Vec<SparseVector>)> {
    fit_transform_with(documents, &TfidfConfig::default())
}

pub fn fit_transform_with<S: AsRef<str>>(
    documents: &[Vec<S>],
    config: &TfidfConfig,
) -> Result<(Vocabulary, Vec<SparseVector>)> {
    let vocab = fit_vocabulary_with(documents, config)?;
    let vectors = documents.iter().map(|d| transform_with(d, &vocab, config)).collect();
    Ok((vocab, vectors))
}
