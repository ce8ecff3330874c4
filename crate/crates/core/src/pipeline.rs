//! A fitted vocabulary and classifier bundled together, so raw review text
//! goes in and a labelled, explained prediction comes out.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{class_counts, preprocess_text, Review, SentimentLabel, NUM_CLASSES};
use crate::features::{fit_vocabulary, FeatureConfig, FeatureError, SparseVector, Vocabulary};
use crate::metrics::{evaluate_labels, EvalReport, MetricsError};
use crate::models::{
    compute_class_weights, explain_linear, posterior_probabilities, train_logreg, train_nb,
    train_svm_ovr, ClassWeights, Classifier, Contribution, ModelError, ModelKind, ScoreKind,
    TrainConfig, TrainTrace, WeightMode,
};

/// Number of contributing terms reported with each linear-model prediction.
pub const TOP_FEATURES: usize = 5;

/// Set on predictions whose text is empty after normalization.
pub const EMPTY_TEXT_WARNING: &str =
    "text is empty after cleaning; prediction uses class priors only";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// How a model was trained. Stored verbatim in the model envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    /// Split seed, when the training set came from a seeded split.
    pub seed: Option<u64>,
    /// Hash of the split manifest the training set came from.
    pub split_sha256: Option<String>,
    /// `None` for naive Bayes, which is unweighted.
    pub weight_mode: Option<WeightMode>,
    pub class_weights: Option<[f64; NUM_CLASSES]>,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub class_counts: [usize; NUM_CLASSES],
    /// Optimizer steps per subproblem (one for logistic regression, three
    /// for the SVM, none for naive Bayes).
    pub iterations: Vec<usize>,
    pub converged: bool,
    pub created_unix: u64,
}

/// Vocabulary, feature settings, classifier and training record.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentModel {
    pub feature_config: FeatureConfig,
    pub vocabulary: Vocabulary,
    pub classifier: Classifier,
    pub metadata: TrainingMetadata,
}

/// What training reports back besides the model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub class_counts: [usize; NUM_CLASSES],
    /// Weights actually applied; all ones for naive Bayes.
    pub class_weights: ClassWeights,
    pub n_features: usize,
    pub traces: Vec<TrainTrace>,
}

/// Prediction for one raw input text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TextPrediction {
    pub cleaned_text: String,
    pub label: SentimentLabel,
    /// Per-class scores by ordinal. Naive Bayes posteriors are normalized to
    /// probabilities; SVM scores are raw margins.
    pub scores: [f64; NUM_CLASSES],
    pub score_kind: ScoreKind,
    pub top_features: Vec<Contribution>,
    pub warning: Option<String>,
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set so builds can be
/// made reproducible.
pub fn creation_timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}

/// Fits the vocabulary on `reviews` and trains a `kind` classifier on their
/// TF-IDF vectors.
pub fn train_model(
    reviews: &[Review],
    kind: ModelKind,
    feature_config: &FeatureConfig,
    train_config: &TrainConfig,
) -> Result<(SentimentModel, TrainSummary), PipelineError> {
    feature_config.validate()?;
    train_config.validate()?;
    let texts: Vec<&str> = reviews.iter().map(|r| r.text.as_str()).collect();
    let vocabulary = fit_vocabulary(&texts, feature_config)?;
    let x: Vec<SparseVector> = texts
        .iter()
        .map(|t| vocabulary.transform(t, feature_config))
        .collect();
    let y: Vec<SentimentLabel> = reviews.iter().map(|r| r.label).collect();
    let n_features = vocabulary.len();
    let counts = class_counts(&y);

    let (classifier, weights, traces) = match kind {
        ModelKind::LogReg => {
            let weights = compute_class_weights(counts, train_config.weight_mode)?;
            let (m, trace) = train_logreg(&x, &y, n_features, &weights, train_config)?;
            (Classifier::LogReg(m), weights, vec![trace])
        }
        ModelKind::Svm => {
            let weights = compute_class_weights(counts, train_config.weight_mode)?;
            let (m, traces) = train_svm_ovr(&x, &y, n_features, &weights, train_config)?;
            (Classifier::Svm(m), weights, traces)
        }
        ModelKind::Nb => {
            let m = train_nb(&x, &y, n_features, train_config.alpha)?;
            (Classifier::Nb(m), ClassWeights::uniform(), Vec::new())
        }
    };

    let weighted = kind.is_weighted();
    let metadata = TrainingMetadata {
        seed: None,
        split_sha256: None,
        weight_mode: weighted.then_some(train_config.weight_mode),
        class_weights: weighted.then_some(weights.as_array()),
        lambda: weighted.then_some(train_config.lambda),
        alpha: (!weighted).then_some(train_config.alpha),
        max_iter: weighted.then_some(train_config.max_iter),
        tol: weighted.then_some(train_config.tol),
        class_counts: counts,
        iterations: traces.iter().map(|t| t.iterations).collect(),
        converged: traces.iter().all(|t| t.converged),
        created_unix: creation_timestamp(),
    };
    let model = SentimentModel {
        feature_config: feature_config.clone(),
        vocabulary,
        classifier,
        metadata,
    };
    let summary = TrainSummary {
        class_counts: counts,
        class_weights: weights,
        n_features,
        traces,
    };
    Ok((model, summary))
}

impl SentimentModel {
    pub fn kind(&self) -> ModelKind {
        self.classifier.kind()
    }

    /// TF-IDF vector of already-normalized text.
    pub fn vectorize(&self, cleaned_text: &str) -> SparseVector {
        self.vocabulary
            .transform(cleaned_text, &self.feature_config)
    }

    /// Label for already-normalized text.
    pub fn predict_cleaned(&self, cleaned_text: &str) -> SentimentLabel {
        self.classifier.predict(&self.vectorize(cleaned_text)).label
    }

    /// Normalizes `raw`, predicts, and explains the prediction.
    pub fn predict_text(&self, raw: &str) -> TextPrediction {
        let cleaned_text = preprocess_text(raw);
        let x = self.vectorize(&cleaned_text);
        let prediction = self.classifier.predict(&x);
        let (scores, score_kind) = match prediction.kind {
            ScoreKind::LogPosterior => (
                posterior_probabilities(&prediction.scores),
                ScoreKind::Probability,
            ),
            kind => (prediction.scores, kind),
        };
        let top_features = match self.classifier.as_linear() {
            Some(linear) => explain_linear(linear, &x, &self.vocabulary, TOP_FEATURES),
            None => Vec::new(),
        };
        let warning = cleaned_text
            .is_empty()
            .then(|| EMPTY_TEXT_WARNING.to_string());
        TextPrediction {
            cleaned_text,
            label: prediction.label,
            scores,
            score_kind,
            top_features,
            warning,
        }
    }

    /// Evaluates on reviews whose text is already normalized.
    pub fn evaluate(
        &self,
        reviews: &[Review],
        model_name: &str,
    ) -> Result<EvalReport, PipelineError> {
        let y_true: Vec<SentimentLabel> = reviews.iter().map(|r| r.label).collect();
        let y_pred: Vec<SentimentLabel> = reviews
            .iter()
            .map(|r| self.predict_cleaned(&r.text))
            .collect();
        Ok(evaluate_labels(&y_true, &y_pred, model_name)?)
    }
}
