//! Independent, deliberately naive reimplementations used as test oracles.

use std::collections::{BTreeMap, BTreeSet};

use ulasan::models::Objective;

/// Dense TF-IDF matrix for already-cleaned documents, computed by brute
/// force: whitespace split, drop one-character words, uni+bigrams.
pub struct DenseTfidf {
    pub terms: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn grams(doc: &str, nmax: usize) -> Vec<String> {
    let words: Vec<&str> = doc
        .split_whitespace()
        .filter(|w| w.chars().count() >= 2)
        .collect();
    let mut out = Vec::new();
    for n in 1..=nmax {
        if words.len() >= n {
            for i in 0..=words.len() - n {
                out.push(words[i..i + n].join(" "));
            }
        }
    }
    out
}

pub fn dense_tfidf(
    docs: &[String],
    nmax: usize,
    min_df: usize,
    max_features: usize,
    sublinear: bool,
) -> DenseTfidf {
    let counts: Vec<BTreeMap<String, usize>> = docs
        .iter()
        .map(|d| {
            let mut m = BTreeMap::new();
            for g in grams(d, nmax) {
                *m.entry(g).or_insert(0) += 1;
            }
            m
        })
        .collect();
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    let mut total: BTreeMap<String, usize> = BTreeMap::new();
    for m in &counts {
        for (t, c) in m {
            *df.entry(t.clone()).or_insert(0) += 1;
            *total.entry(t.clone()).or_insert(0) += c;
        }
    }
    let mut kept: Vec<String> = df
        .iter()
        .filter(|(_, &d)| d >= min_df)
        .map(|(t, _)| t.clone())
        .collect();
    if kept.len() > max_features {
        kept.sort_by(|a, b| total[b].cmp(&total[a]).then(a.cmp(b)));
        kept.truncate(max_features);
    }
    let terms: Vec<String> = kept
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = docs.len() as f64;
    let rows = counts
        .iter()
        .map(|m| {
            let mut row: Vec<f64> = terms
                .iter()
                .map(|t| match m.get(t) {
                    None => 0.0,
                    Some(&c) => {
                        let tf = if sublinear {
                            1.0 + (c as f64).ln()
                        } else {
                            c as f64
                        };
                        tf * (((1.0 + n) / (1.0 + df[t] as f64)).ln() + 1.0)
                    }
                })
                .collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
            row
        })
        .collect();
    DenseTfidf { terms, rows }
}

/// Metrics straight from label pairs: (accuracy, precision, recall, f1,
/// macro f1, weighted f1).
pub struct BruteMetrics {
    pub accuracy: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub macro_f1: f64,
    pub weighted_f1: f64,
}

pub fn brute_metrics(y_true: &[usize], y_pred: &[usize], classes: usize) -> BruteMetrics {
    let n = y_true.len() as f64;
    let pairs = || y_true.iter().zip(y_pred);
    let accuracy = pairs().filter(|(t, p)| t == p).count() as f64 / n;
    let (mut precision, mut recall, mut f1, mut support) = (vec![], vec![], vec![], vec![]);
    for c in 0..classes {
        let tp = pairs().filter(|(t, p)| **t == c && **p == c).count() as f64;
        let predicted = y_pred.iter().filter(|p| **p == c).count() as f64;
        let actual = y_true.iter().filter(|t| **t == c).count() as f64;
        let p = if predicted == 0.0 {
            0.0
        } else {
            tp / predicted
        };
        let r = if actual == 0.0 { 0.0 } else { tp / actual };
        precision.push(p);
        recall.push(r);
        f1.push(if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        });
        support.push(actual);
    }
    let macro_f1 = f1.iter().sum::<f64>() / classes as f64;
    let weighted_f1 = f1.iter().zip(&support).map(|(f, s)| f * s).sum::<f64>() / n;
    BruteMetrics {
        accuracy,
        precision,
        recall,
        f1,
        macro_f1,
        weighted_f1,
    }
}

/// Relative error `||analytic - numeric|| / max(||analytic||, ||numeric||)`
/// between the analytic gradient and central differences with step `h`.
pub fn gradient_relative_error(objective: &dyn Objective, at: &[f64], h: f64) -> f64 {
    let mut analytic = vec![0.0; at.len()];
    objective.value_and_gradient(at, &mut analytic);
    let mut point = at.to_vec();
    let numeric: Vec<f64> = (0..at.len())
        .map(|i| {
            let orig = point[i];
            point[i] = orig + h;
            let up = objective.value(&point);
            point[i] = orig - h;
            let down = objective.value(&point);
            point[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
    let scale = norm(&analytic).max(norm(&numeric));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}
