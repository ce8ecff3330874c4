use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::{CorpusError, Review, SentimentLabel};

/// SplitMix64 generator. Small, fast, and trivially portable, which keeps
/// splits bit-identical across implementations.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Fisher-Yates shuffle from the back; the swap partner for position `i`
    /// is `next_u64() % (i + 1)`.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}

/// A train/test partition of a review list.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<Review>,
    pub test: Vec<Review>,
    /// Original corpus indices of `train`, ascending.
    pub train_indices: Vec<usize>,
    /// Original corpus indices of `test`, ascending.
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub test_fraction: f64,
}

impl DatasetSplit {
    /// One `index<TAB>train|test` line per corpus index, in index order.
    pub fn manifest(&self) -> String {
        let n = self.train_indices.len() + self.test_indices.len();
        let mut side = vec!["train"; n];
        for &i in &self.test_indices {
            side[i] = "test";
        }
        let mut out = String::with_capacity(n * 10);
        for (i, s) in side.iter().enumerate() {
            let _ = writeln!(out, "{i}\t{s}");
        }
        out
    }

    /// Hex SHA-256 of [`manifest`](Self::manifest).
    pub fn manifest_sha256(&self) -> String {
        hex::encode(Sha256::digest(self.manifest().as_bytes()))
    }
}

/// Number of test items drawn from a class of size `n`: `n * fraction`
/// rounded half up.
pub(crate) fn test_count(n: usize, fraction: f64) -> usize {
    (n as f64 * fraction + 0.5).floor() as usize
}

/// Seeded per-class split.
///
/// Each class's corpus indices are shuffled by a [`SplitMix64`] seeded with
/// `seed ^ ordinal`; the first `round(n_c * test_fraction)` go to test. Both
/// output lists keep original corpus order.
pub fn stratified_split(
    reviews: &[Review],
    test_fraction: f64,
    seed: u64,
) -> Result<DatasetSplit, CorpusError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(test_fraction));
    }
    if reviews.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }

    let mut is_test = vec![false; reviews.len()];
    for label in SentimentLabel::ALL {
        let mut members: Vec<usize> = reviews
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == label)
            .map(|(i, _)| i)
            .collect();
        SplitMix64::new(seed ^ label.ordinal() as u64).shuffle(&mut members);
        let k = test_count(members.len(), test_fraction);
        for &i in &members[..k] {
            is_test[i] = true;
        }
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    let (mut train_indices, mut test_indices) = (Vec::new(), Vec::new());
    for (i, review) in reviews.iter().enumerate() {
        if is_test[i] {
            test.push(review.clone());
            test_indices.push(i);
        } else {
            train.push(review.clone());
            train_indices.push(i);
        }
    }
    Ok(DatasetSplit {
        train,
        test,
        train_indices,
        test_indices,
        seed,
        test_fraction,
    })
}
