//! Shared fixture loading for integration tests.
#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;
use std::sync::LazyLock;

use serde_json::Value;
use ulasan::corpus::{
    clean_corpus, load_csv, stratified_split, DatasetSplit, LabelMap, Review, SentimentLabel,
};
use ulasan::features::{fit_vocabulary, FeatureConfig, FeatureError, SparseVector};

pub const SEPARABLE: &str = "separable_300.csv";
pub const IMBALANCED: &str = "imbalanced_1000.csv";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub static GOLDEN: LazyLock<Value> = LazyLock::new(|| {
    let text = std::fs::read_to_string(fixture("golden.json")).expect("golden.json");
    serde_json::from_str(&text).expect("golden.json parses")
});

pub fn reviews(name: &str) -> Vec<Review> {
    let records = load_csv(fixture(name)).expect("fixture loads");
    clean_corpus(&records, &LabelMap::default())
        .expect("fixture labels are valid")
        .0
}

pub fn split(name: &str) -> DatasetSplit {
    stratified_split(&reviews(name), 0.2, 42).expect("split")
}

pub fn golden_f64(path: &[&str]) -> f64 {
    let mut v = &*GOLDEN;
    for key in path {
        v = &v[*key];
    }
    v.as_f64()
        .unwrap_or_else(|| panic!("golden value {path:?}"))
}

pub fn golden_vec(path: &[&str]) -> Vec<f64> {
    let mut v = &*GOLDEN;
    for key in path {
        v = &v[*key];
    }
    v.as_array()
        .unwrap_or_else(|| panic!("golden array {path:?}"))
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

/// Small seeded generator for test inputs.
pub struct TestRng(ulasan::corpus::SplitMix64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ulasan::corpus::SplitMix64::new(seed))
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

/// Word pool for random corpora, mixing one-character words, digits and
/// multi-byte letters.
pub const WORDS: &[&str] = &[
    "bagus", "murah", "kirim", "cepat", "a", "x9", "12", "é", "éa", "ñandú", "ok", "barang", "z",
];

/// A random cleaned-text corpus of `1..=max_docs` documents.
pub fn random_corpus(rng: &mut TestRng, max_docs: usize, max_words: usize) -> Vec<String> {
    let docs = 1 + rng.below(max_docs);
    (0..docs)
        .map(|_| {
            let words = rng.below(max_words + 1);
            (0..words)
                .map(|_| *rng.pick(WORDS))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Random texts for service and persistence checks: words, punctuation,
/// capitals, URLs and emoji, sometimes nothing usable at all.
pub fn random_raw_text(rng: &mut TestRng) -> String {
    const PIECES: &[&str] = &[
        "bagus",
        "BAGUS",
        "Mantap!!",
        "kecewa",
        "rusak,",
        "biasa",
        "saja",
        "standar",
        "pengiriman",
        "cepat",
        "barang",
        "https://toko.id/x?y=1",
        "www.promo.com",
        "😊",
        "👍👍",
        "!!!",
        "?",
        "123",
        "ok",
        "jelek",
        "sesuai",
        "Ñ",
        "\t",
        "murah",
        "palsu",
        "oke",
    ];
    let n = rng.below(12);
    (0..n)
        .map(|_| *rng.pick(PIECES))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Largest absolute difference between library vectors and the oracle, or
/// `None` when both agree the vocabulary is empty.
pub fn tfidf_max_diff(docs: &[String], cfg: &FeatureConfig) -> Option<f64> {
    let oracle = oracle::dense_tfidf(
        docs,
        cfg.ngram_max,
        cfg.min_df,
        cfg.max_features,
        cfg.sublinear_tf,
    );
    match fit_vocabulary(docs, cfg) {
        Err(FeatureError::EmptyVocabulary) => {
            assert!(
                oracle.terms.is_empty(),
                "library found no terms, oracle found {:?}",
                oracle.terms
            );
            None
        }
        Err(e) => panic!("unexpected error {e}"),
        Ok(vocab) => {
            assert_eq!(vocab.terms(), oracle.terms.as_slice());
            let mut worst = 0.0f64;
            for (doc, row) in docs.iter().zip(&oracle.rows) {
                let v = vocab.transform(doc, cfg).to_dense(vocab.len());
                for (a, b) in v.iter().zip(row) {
                    worst = worst.max((a - b).abs());
                }
            }
            Some(worst)
        }
    }
}

pub fn random_feature_config(rng: &mut TestRng) -> FeatureConfig {
    FeatureConfig {
        ngram_min: 1,
        ngram_max: 1 + rng.below(2),
        max_features: 1 + rng.below(50),
        min_df: 1 + rng.below(3),
        sublinear_tf: rng.below(2) == 0,
    }
}

/// Random sparse training problem; the first three documents cover every
/// class.
pub fn random_problem(
    rng: &mut TestRng,
    docs: usize,
    features: usize,
) -> (Vec<SparseVector>, Vec<SentimentLabel>) {
    let mut x = Vec::with_capacity(docs);
    for _ in 0..docs {
        let mut pairs = Vec::new();
        for i in 0..features {
            if rng.unit() < 0.4 {
                pairs.push((i, rng.range(0.0, 1.0)));
            }
        }
        x.push(SparseVector::from_pairs(pairs));
    }
    let y = (0..docs)
        .map(|i| SentimentLabel::ALL[if i < 3 { i } else { rng.below(3) }])
        .collect();
    (x, y)
}

/// Random sparse vector with up to 11 entries below `dim`.
pub fn random_vector(rng: &mut TestRng, dim: usize) -> SparseVector {
    let nnz = rng.below(12);
    SparseVector::from_pairs(
        (0..nnz)
            .map(|_| (rng.below(dim), rng.range(0.0, 1.0)))
            .collect::<Vec<_>>(),
    )
}
