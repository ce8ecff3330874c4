//! The versioned model envelope: one pretty-printed JSON document holding
//! the feature settings, vocabulary, parameters and training record.
//!
//! Field order is fixed and floats are written in shortest round-trip form,
//! so loading and re-saving a model reproduces the same bytes. Linear
//! weights are stored per class as sparse `[index, value]` pairs; a naive
//! Bayes log-likelihood of `-inf` is stored as `null`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{SentimentLabel, NUM_CLASSES};
use crate::features::{FeatureConfig, Vocabulary};
use crate::models::{Classifier, LinearParams, LogRegModel, ModelKind, NbModel, SvmModel};
use crate::pipeline::{SentimentModel, TrainingMetadata};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum PersistenceError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported envelope format_version {0} (this build reads {FORMAT_VERSION})")]
    UnsupportedVersion(u64),
    #[error("corrupt model envelope: {0}")]
    CorruptEnvelope(String),
}

fn corrupt(msg: impl Into<String>) -> PersistenceError {
    PersistenceError::CorruptEnvelope(msg.into())
}

#[derive(Debug, Serialize, Deserialize)]
struct VocabularyDoc {
    n_docs: usize,
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    idf: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LinearDoc {
    n_features: usize,
    bias: Vec<f64>,
    /// One list of `[index, value]` pairs per class, indices ascending.
    weights: Vec<Vec<(usize, f64)>>,
    lambda: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct NbDoc {
    n_features: usize,
    alpha: f64,
    log_prior: Vec<Option<f64>>,
    /// One dense row per class.
    log_likelihood: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ParametersDoc {
    Linear(LinearDoc),
    Nb(NbDoc),
}

#[derive(Debug, Serialize, Deserialize)]
struct EnvelopeDoc {
    format_version: u64,
    model_type: ModelKind,
    class_names: Vec<String>,
    feature_config: FeatureConfig,
    vocabulary: VocabularyDoc,
    parameters: ParametersDoc,
    training_metadata: TrainingMetadata,
}

fn linear_doc(params: &LinearParams, lambda: f64) -> LinearDoc {
    let weights = (0..NUM_CLASSES)
        .map(|c| {
            params
                .row(c)
                .iter()
                .enumerate()
                // keep -0.0 so reloaded scores match bit for bit
                .filter(|(_, w)| w.to_bits() != 0)
                .map(|(i, &w)| (i, w))
                .collect()
        })
        .collect();
    LinearDoc {
        n_features: params.n_features(),
        bias: params.bias().to_vec(),
        weights,
        lambda,
    }
}

fn finite_or_null(v: f64) -> Option<f64> {
    (v != f64::NEG_INFINITY).then_some(v)
}

/// Serializes a model to envelope text.
pub fn to_envelope_string(model: &SentimentModel) -> String {
    let vocab = &model.vocabulary;
    let parameters = match &model.classifier {
        Classifier::LogReg(m) => ParametersDoc::Linear(linear_doc(&m.params, m.lambda)),
        Classifier::Svm(m) => ParametersDoc::Linear(linear_doc(&m.params, m.lambda)),
        Classifier::Nb(m) => ParametersDoc::Nb(NbDoc {
            n_features: m.n_features(),
            alpha: m.alpha(),
            log_prior: m.log_prior().iter().map(|&v| finite_or_null(v)).collect(),
            log_likelihood: (0..NUM_CLASSES)
                .map(|c| {
                    m.log_likelihood_row(c)
                        .iter()
                        .map(|&v| finite_or_null(v))
                        .collect()
                })
                .collect(),
        }),
    };
    let doc = EnvelopeDoc {
        format_version: FORMAT_VERSION,
        model_type: model.kind(),
        class_names: SentimentLabel::names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        feature_config: model.feature_config.clone(),
        vocabulary: VocabularyDoc {
            n_docs: vocab.n_docs(),
            terms: vocab.terms().to_vec(),
            doc_freq: vocab.doc_freqs().to_vec(),
            idf: vocab.idfs().to_vec(),
        },
        parameters,
        training_metadata: model.metadata.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("envelope is always serializable");
    text.push('\n');
    text
}

/// Writes the envelope to `path`, replacing any existing file.
pub fn save_model(model: &SentimentModel, path: impl AsRef<Path>) -> Result<(), PersistenceError> {
    let path = path.as_ref();
    fs::write(path, to_envelope_string(model)).map_err(|source| PersistenceError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates an envelope file.
pub fn load_model(path: impl AsRef<Path>) -> Result<SentimentModel, PersistenceError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| PersistenceError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_envelope_str(&text)
}

fn three<T: Copy>(v: &[T], what: &str) -> Result<[T; NUM_CLASSES], PersistenceError> {
    v.try_into().map_err(|_| {
        corrupt(format!(
            "{what} has {} entries, expected {NUM_CLASSES}",
            v.len()
        ))
    })
}

fn linear_params(doc: &LinearDoc, vocab_len: usize) -> Result<LinearParams, PersistenceError> {
    if doc.n_features != vocab_len {
        return Err(corrupt(format!(
            "parameters cover {} features but the vocabulary has {vocab_len}",
            doc.n_features
        )));
    }
    if doc.weights.len() != NUM_CLASSES {
        return Err(corrupt(format!(
            "weight matrix has {} rows, expected {NUM_CLASSES}",
            doc.weights.len()
        )));
    }
    let bias = three(&doc.bias, "bias")?;
    let mut params = LinearParams::zeros(doc.n_features);
    params.set_bias(bias);
    for (c, pairs) in doc.weights.iter().enumerate() {
        let row = params.row_mut(c);
        let mut previous = None;
        for &(i, w) in pairs {
            if i >= row.len() {
                return Err(corrupt(format!("weight index {i} out of range in row {c}")));
            }
            if previous.is_some_and(|p| p >= i) {
                return Err(corrupt(format!(
                    "weight indices not strictly ascending in row {c}"
                )));
            }
            previous = Some(i);
            row[i] = w;
        }
    }
    if !params.is_finite() {
        return Err(corrupt("non-finite weight or bias"));
    }
    if !(doc.lambda >= 0.0 && doc.lambda.is_finite()) {
        return Err(corrupt("lambda must be finite and non-negative"));
    }
    Ok(params)
}

fn log_value(v: Option<f64>) -> Result<f64, PersistenceError> {
    match v {
        None => Ok(f64::NEG_INFINITY),
        Some(v) if v.is_finite() && v <= 0.0 => Ok(v),
        Some(v) => Err(corrupt(format!("log-probability {v} is positive"))),
    }
}

fn nb_model(doc: &NbDoc, vocab_len: usize) -> Result<NbModel, PersistenceError> {
    if doc.n_features != vocab_len {
        return Err(corrupt(format!(
            "parameters cover {} features but the vocabulary has {vocab_len}",
            doc.n_features
        )));
    }
    if doc.log_likelihood.len() != NUM_CLASSES {
        return Err(corrupt(format!(
            "likelihood table has {} rows, expected {NUM_CLASSES}",
            doc.log_likelihood.len()
        )));
    }
    let prior: Vec<f64> = doc
        .log_prior
        .iter()
        .map(|&v| log_value(v))
        .collect::<Result<_, _>>()?;
    let mut table = Vec::with_capacity(NUM_CLASSES * doc.n_features);
    for (c, row) in doc.log_likelihood.iter().enumerate() {
        if row.len() != doc.n_features {
            return Err(corrupt(format!(
                "likelihood row {c} has {} entries",
                row.len()
            )));
        }
        for &v in row {
            table.push(log_value(v)?);
        }
    }
    if !(doc.alpha >= 0.0 && doc.alpha.is_finite()) {
        return Err(corrupt("alpha must be finite and non-negative"));
    }
    NbModel::from_parts(
        doc.n_features,
        three(&prior, "log_prior")?,
        table,
        doc.alpha,
    )
    .ok_or_else(|| corrupt("likelihood table shape"))
}

/// Parses and validates envelope text.
pub fn from_envelope_str(text: &str) -> Result<SentimentModel, PersistenceError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| corrupt(format!("not valid JSON: {e}")))?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| corrupt("missing or non-integer format_version"))?;
    if version != FORMAT_VERSION {
        return Err(PersistenceError::UnsupportedVersion(version));
    }
    let doc: EnvelopeDoc = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;

    let expected_names = SentimentLabel::names();
    if doc.class_names.len() != NUM_CLASSES
        || doc
            .class_names
            .iter()
            .zip(expected_names)
            .any(|(a, b)| a != b)
    {
        return Err(corrupt(format!(
            "class_names {:?}, expected {expected_names:?}",
            doc.class_names
        )));
    }
    doc.feature_config
        .validate()
        .map_err(|e| corrupt(e.to_string()))?;
    let v = doc.vocabulary;
    let vocabulary = Vocabulary::from_parts(v.terms, v.doc_freq, v.idf, v.n_docs)
        .map_err(|e| corrupt(e.to_string()))?;

    let classifier = match (doc.model_type, &doc.parameters) {
        (ModelKind::LogReg, ParametersDoc::Linear(p)) => Classifier::LogReg(LogRegModel {
            params: linear_params(p, vocabulary.len())?,
            lambda: p.lambda,
        }),
        (ModelKind::Svm, ParametersDoc::Linear(p)) => Classifier::Svm(SvmModel {
            params: linear_params(p, vocabulary.len())?,
            lambda: p.lambda,
        }),
        (ModelKind::Nb, ParametersDoc::Nb(p)) => Classifier::Nb(nb_model(p, vocabulary.len())?),
        (kind, _) => {
            return Err(corrupt(format!(
                "parameters do not match model_type {kind}"
            )))
        }
    };

    Ok(SentimentModel {
        feature_config: doc.feature_config,
        vocabulary,
        classifier,
        metadata: doc.training_metadata,
    })
}
