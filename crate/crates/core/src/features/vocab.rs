use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{analyze, FeatureConfig, FeatureError, SparseVector};

/// Fitted feature space. Terms are stored in lexicographic order and a term's
/// column index is its position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    idf: Vec<f64>,
    n_docs: usize,
}

/// Smoothed inverse document frequency, always positive.
pub(crate) fn smoothed_idf(n_docs: usize, doc_freq: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + doc_freq as f64)).ln() + 1.0
}

impl Vocabulary {
    /// Reassembles a vocabulary from stored parts, checking its invariants.
    pub fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<usize>,
        idf: Vec<f64>,
        n_docs: usize,
    ) -> Result<Self, FeatureError> {
        let bad = |msg: String| Err(FeatureError::InvalidVocabulary(msg));
        if terms.len() != doc_freq.len() || terms.len() != idf.len() {
            return bad("terms, doc_freq and idf lengths differ".into());
        }
        if terms.is_empty() {
            return bad("no terms".into());
        }
        if let Some(w) = terms.windows(2).find(|w| w[0] >= w[1]) {
            return bad(format!(
                "terms not in strict lexicographic order at `{}`",
                w[1]
            ));
        }
        if let Some(df) = doc_freq.iter().find(|&&df| df == 0 || df > n_docs) {
            return bad(format!("document frequency {df} outside 1..={n_docs}"));
        }
        if let Some(v) = idf.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return bad(format!("idf {v} is not a positive finite number"));
        }
        Ok(Self {
            terms,
            doc_freq,
            idf,
            n_docs,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freqs(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn idfs(&self) -> &[f64] {
        &self.idf
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn doc_freq(&self, index: usize) -> usize {
        self.doc_freq[index]
    }

    pub fn idf(&self, index: usize) -> f64 {
        self.idf[index]
    }

    /// See [`transform`].
    pub fn transform(&self, text: &str, config: &FeatureConfig) -> SparseVector {
        transform(text, self, config)
    }
}

/// Fits a vocabulary on normalized training texts.
///
/// Terms seen in fewer than `min_df` documents are removed first. If more
/// than `max_features` remain, the ones with the highest total corpus count
/// are kept, ties going to the lexicographically smaller term.
pub fn fit_vocabulary<S: AsRef<str>>(
    corpus: &[S],
    config: &FeatureConfig,
) -> Result<Vocabulary, FeatureError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }

    // term -> (document frequency, total count)
    let mut stats: HashMap<String, (usize, usize)> = HashMap::new();
    for doc in corpus {
        let mut seen = HashSet::new();
        for term in analyze(doc.as_ref(), config) {
            if seen.insert(term.clone()) {
                let entry = stats.entry(term).or_default();
                entry.0 += 1;
                entry.1 += 1;
            } else {
                stats.get_mut(&term).expect("seen term has stats").1 += 1;
            }
        }
    }

    let mut kept: Vec<(String, usize, usize)> = stats
        .into_iter()
        .filter(|(_, (df, _))| *df >= config.min_df)
        .map(|(term, (df, tf))| (term, df, tf))
        .collect();
    if kept.is_empty() {
        return Err(FeatureError::EmptyVocabulary);
    }
    if kept.len() > config.max_features {
        kept.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
        kept.truncate(config.max_features);
    }
    kept.sort_by(|a, b| a.0.cmp(&b.0));

    let n_docs = corpus.len();
    let mut terms = Vec::with_capacity(kept.len());
    let mut doc_freq = Vec::with_capacity(kept.len());
    let mut idf = Vec::with_capacity(kept.len());
    for (term, df, _) in kept {
        terms.push(term);
        doc_freq.push(df);
        idf.push(smoothed_idf(n_docs, df));
    }
    Ok(Vocabulary {
        terms,
        doc_freq,
        idf,
        n_docs,
    })
}

/// Maps a normalized text to its TF-IDF vector.
///
/// In-document counts `tf` of vocabulary terms become `1 + ln(tf)` when
/// `sublinear_tf` is set, are multiplied by the term's idf, and the result is
/// scaled to unit Euclidean norm. Unknown terms are ignored, so a text with no
/// vocabulary terms maps to the empty vector.
pub fn transform(text: &str, vocab: &Vocabulary, config: &FeatureConfig) -> SparseVector {
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for term in analyze(text, config) {
        if let Some(i) = vocab.index_of(&term) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let mut indices = Vec::with_capacity(counts.len());
    let mut values = Vec::with_capacity(counts.len());
    for (i, tf) in counts {
        let tf = if config.sublinear_tf {
            1.0 + f64::from(tf).ln()
        } else {
            f64::from(tf)
        };
        indices.push(i);
        values.push(tf * vocab.idf[i]);
    }
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in &mut values {
            *v /= norm;
        }
    }
    SparseVector::from_sorted_unchecked(indices, values)
}
