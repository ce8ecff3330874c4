//! TF-IDF featurization.
//!
//! [`fit_vocabulary`] builds a capped uni+bigram [`Vocabulary`] from training
//! texts; [`transform`] maps a text to an L2-normalized [`SparseVector`] of
//! sublinear TF-IDF weights over that vocabulary.

mod sparse;
mod vocab;

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use sparse::SparseVector;
pub use vocab::{fit_vocabulary, transform, Vocabulary};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no term survived the document-frequency filter")]
    EmptyVocabulary,
    #[error("invalid feature config: {0}")]
    InvalidConfig(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("invalid sparse vector: {0}")]
    InvalidSparse(String),
}

/// Vectorizer settings. The defaults are unigrams plus bigrams, at most
/// 50,000 features, terms present in at least two documents, and sublinear
/// term frequency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub max_features: usize,
    pub min_df: usize,
    pub sublinear_tf: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            ngram_min: 1,
            ngram_max: 2,
            max_features: 50_000,
            min_df: 2,
            sublinear_tf: true,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        let bad = |msg: &str| Err(FeatureError::InvalidConfig(msg.to_string()));
        if self.ngram_min < 1 {
            return bad("ngram_min must be at least 1");
        }
        if self.ngram_max < self.ngram_min {
            return bad("ngram_max must be >= ngram_min");
        }
        if self.max_features < 1 {
            return bad("max_features must be at least 1");
        }
        if self.min_df < 1 {
            return bad("min_df must be at least 1");
        }
        Ok(())
    }
}

static TOKEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\w{2,}").expect("valid token pattern"));

/// Splits normalized text into tokens: maximal runs of word characters at
/// least two characters long. Single-character runs are discarded.
pub fn tokenize(text: &str) -> Vec<&str> {
    TOKEN.find_iter(text).map(|m| m.as_str()).collect()
}

/// All contiguous n-grams for `n` in `nmin..=nmax`, tokens joined by one
/// space: every unigram in position order, then every bigram, and so on.
pub fn extract_ngrams(tokens: &[&str], nmin: usize, nmax: usize) -> Vec<String> {
    assert!(nmin >= 1 && nmin <= nmax, "require 1 <= nmin <= nmax");
    let mut out = Vec::new();
    for n in nmin..=nmax {
        out.extend(tokens.windows(n).map(|w| w.join(" ")));
    }
    out
}

/// Tokenizes and expands to n-grams per `config`.
pub fn analyze(text: &str, config: &FeatureConfig) -> Vec<String> {
    extract_ngrams(&tokenize(text), config.ngram_min, config.ngram_max)
}
