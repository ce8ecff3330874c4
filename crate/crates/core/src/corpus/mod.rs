//! Review ingestion and cleaning.
//!
//! Raw CSV rows become [`RawRecord`]s, which [`clean_corpus`] turns into
//! [`Review`]s by normalizing the text with [`preprocess_text`] and mapping the
//! source label through a [`LabelMap`]. Rows whose text is empty after
//! normalization are dropped.

mod csv_io;
mod split;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use csv_io::{load_csv, read_csv, write_reviews_csv};
pub use split::{stratified_split, DatasetSplit, SplitMix64};
pub use text::preprocess_text;

/// Number of sentiment classes.
pub const NUM_CLASSES: usize = 3;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing column `{0}` in CSV header")]
    MissingColumn(String),
    #[error("malformed CSV row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("unknown label `{token}` at row {row}")]
    UnknownLabel { token: String, row: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Canonical sentiment class. The ordinal codes are part of the model file
/// format and never change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Negatif = 0,
    Netral = 1,
    Positif = 2,
}

impl SentimentLabel {
    /// All labels in ordinal order.
    pub const ALL: [SentimentLabel; NUM_CLASSES] = [
        SentimentLabel::Negatif,
        SentimentLabel::Netral,
        SentimentLabel::Positif,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Option<Self> {
        Self::ALL.get(ordinal).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            SentimentLabel::Negatif => "negatif",
            SentimentLabel::Netral => "netral",
            SentimentLabel::Positif => "positif",
        }
    }

    /// Canonical class names in ordinal order.
    pub fn names() -> [&'static str; NUM_CLASSES] {
        Self::ALL.map(Self::name)
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SentimentLabel {
    type Err = CorpusError;

    /// Parses through the default [`LabelMap`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        map_label(s, &LabelMap::default())
    }
}

/// One CSV data row before any cleaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub text: String,
    pub label_raw: String,
}

impl RawRecord {
    pub fn new(text: impl Into<String>, label_raw: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            label_raw: label_raw.into(),
        }
    }
}

/// A normalized, non-empty review with its canonical label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Review {
    pub text: String,
    pub label: SentimentLabel,
}

impl Review {
    pub fn new(text: impl Into<String>, label: SentimentLabel) -> Self {
        Self {
            text: text.into(),
            label,
        }
    }
}

/// Case-insensitive mapping from source label tokens to canonical labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    entries: BTreeMap<String, SentimentLabel>,
}

impl LabelMap {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, token: &str, label: SentimentLabel) {
        self.entries.insert(fold(token), label);
    }

    pub fn get(&self, token: &str) -> Option<SentimentLabel> {
        self.entries.get(&fold(token)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Default for LabelMap {
    /// Indonesian and English spellings of the three classes.
    fn default() -> Self {
        let mut map = Self::empty();
        for token in ["positif", "positive", "pos"] {
            map.insert(token, SentimentLabel::Positif);
        }
        for token in ["netral", "neutral", "neu"] {
            map.insert(token, SentimentLabel::Netral);
        }
        for token in ["negatif", "negative", "neg"] {
            map.insert(token, SentimentLabel::Negatif);
        }
        map
    }
}

fn fold(token: &str) -> String {
    token.trim().to_lowercase()
}

/// Looks up `raw` case-insensitively. Surrounding whitespace is ignored.
pub fn map_label(raw: &str, map: &LabelMap) -> Result<SentimentLabel, CorpusError> {
    map.get(raw).ok_or_else(|| CorpusError::UnknownLabel {
        token: raw.to_string(),
        row: 0,
    })
}

/// Normalizes every record and maps its label. Returns the surviving reviews
/// in input order and the number of records dropped for empty text.
///
/// Label errors carry the 0-based index of the offending record.
pub fn clean_corpus(
    records: &[RawRecord],
    map: &LabelMap,
) -> Result<(Vec<Review>, usize), CorpusError> {
    let mut reviews = Vec::with_capacity(records.len());
    let mut dropped = 0;
    for (row, record) in records.iter().enumerate() {
        let label = map
            .get(&record.label_raw)
            .ok_or_else(|| CorpusError::UnknownLabel {
                token: record.label_raw.clone(),
                row,
            })?;
        let text = preprocess_text(&record.text);
        if text.is_empty() {
            dropped += 1;
        } else {
            reviews.push(Review { text, label });
        }
    }
    Ok((reviews, dropped))
}

/// Per-class review counts, indexed by ordinal.
pub fn class_counts<'a>(
    labels: impl IntoIterator<Item = &'a SentimentLabel>,
) -> [usize; NUM_CLASSES] {
    let mut counts = [0; NUM_CLASSES];
    for label in labels {
        counts[label.ordinal()] += 1;
    }
    counts
}
