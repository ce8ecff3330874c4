//! The three classifiers and their shared pieces.
//!
//! Logistic regression and the linear SVM are trained by deterministic
//! full-batch gradient descent with a backtracking line search (see
//! [`optim`]) and take per-class loss weights. Naive Bayes is closed-form and
//! unweighted.

mod explain;
mod logreg;
mod nb;
pub mod optim;
mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{SentimentLabel, NUM_CLASSES};
use crate::features::SparseVector;

pub use explain::{explain_linear, Contribution, LinearModel};
pub use logreg::{predict_logreg, softmax, train_logreg, LogRegModel, SoftmaxCrossEntropy};
pub use nb::{posterior_probabilities, predict_nb, train_nb, NbModel};
pub use optim::{Objective, TrainTrace};
pub use svm::{predict_svm, train_svm_ovr, SquaredHinge, SvmModel};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("class `{0}` has no training examples")]
    ZeroClassCount(SentimentLabel),
    #[error("degenerate training data: {0}")]
    DegenerateData(String),
    #[error("training produced a non-finite loss or parameter")]
    NonFinite,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
}

/// How per-class loss weights are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// `N / (C * n_c)` for class `c`.
    #[default]
    Balanced,
    /// All ones.
    Uniform,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Balanced => "balanced",
            WeightMode::Uniform => "uniform",
        })
    }
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "balanced" => Ok(WeightMode::Balanced),
            "uniform" => Ok(WeightMode::Uniform),
            other => Err(format!(
                "unknown weight mode `{other}` (expected balanced or uniform)"
            )),
        }
    }
}

/// Positive per-class loss multipliers, indexed by class ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights(pub [f64; NUM_CLASSES]);

impl ClassWeights {
    pub fn uniform() -> Self {
        Self([1.0; NUM_CLASSES])
    }

    pub fn get(&self, label: SentimentLabel) -> f64 {
        self.0[label.ordinal()]
    }

    pub fn as_array(&self) -> [f64; NUM_CLASSES] {
        self.0
    }
}

/// Per-class weights from training class counts.
///
/// Balanced mode gives class `c` the weight `N / (C * n_c)`, where `N` is the
/// total count and `C` the number of classes, so `sum_c w_c * n_c = N`.
///
/// ```
/// use ulasan::models::{compute_class_weights, WeightMode};
/// let w = compute_class_weights([1, 3, 6], WeightMode::Balanced).unwrap();
/// assert!((w.0[0] - 10.0 / 3.0).abs() < 1e-12);
/// ```
pub fn compute_class_weights(
    counts: [usize; NUM_CLASSES],
    mode: WeightMode,
) -> Result<ClassWeights, ModelError> {
    match mode {
        WeightMode::Uniform => Ok(ClassWeights::uniform()),
        WeightMode::Balanced => {
            if let Some(c) = counts.iter().position(|&n| n == 0) {
                return Err(ModelError::ZeroClassCount(SentimentLabel::ALL[c]));
            }
            let total = counts.iter().sum::<usize>() as f64;
            let classes = NUM_CLASSES as f64;
            Ok(ClassWeights(counts.map(|n| total / (classes * n as f64))))
        }
    }
}

/// Optimizer settings for the discriminative models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub max_iter: usize,
    /// Stop once the infinity norm of the full gradient drops below this.
    pub tol: f64,
    /// L2 strength on the weights; biases are not penalized.
    pub lambda: f64,
    pub weight_mode: WeightMode,
    /// Additive smoothing for naive Bayes.
    pub alpha: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-6,
            lambda: 1e-4,
            weight_mode: WeightMode::Balanced,
            alpha: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.max_iter < 1 {
            return Err(ModelError::InvalidConfig(
                "max_iter must be at least 1".into(),
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(ModelError::InvalidConfig("tol must be positive".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(ModelError::InvalidConfig(
                "lambda must be a finite non-negative number".into(),
            ));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(ModelError::InvalidConfig(
                "alpha must be a finite non-negative number".into(),
            ));
        }
        Ok(())
    }
}

/// Which classifier family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    LogReg,
    Svm,
    Nb,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::LogReg, ModelKind::Svm, ModelKind::Nb];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::LogReg => "logreg",
            ModelKind::Svm => "svm",
            ModelKind::Nb => "nb",
        }
    }

    /// Row label used in comparison tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::LogReg => "TF-IDF + Logistic Regression",
            ModelKind::Svm => "TF-IDF + Linear SVC",
            ModelKind::Nb => "TF-IDF + Multinomial Naive Bayes",
        }
    }

    /// Whether training takes class weights.
    pub fn is_weighted(self) -> bool {
        !matches!(self, ModelKind::Nb)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "logreg" => Ok(ModelKind::LogReg),
            "svm" => Ok(ModelKind::Svm),
            "nb" => Ok(ModelKind::Nb),
            other => Err(format!(
                "unknown model `{other}` (expected logreg, svm or nb)"
            )),
        }
    }
}

/// What a [`Prediction`]'s scores mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Probability,
    Margin,
    LogPosterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: SentimentLabel,
    pub scores: [f64; NUM_CLASSES],
    pub kind: ScoreKind,
}

/// Index of the largest score; ties and NaNs resolve to the lowest ordinal.
pub fn argmax(scores: &[f64; NUM_CLASSES]) -> SentimentLabel {
    let mut best = 0;
    for c in 1..NUM_CLASSES {
        if scores[c] > scores[best] {
            best = c;
        }
    }
    SentimentLabel::ALL[best]
}

/// A trained model of any family.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    LogReg(LogRegModel),
    Svm(SvmModel),
    Nb(NbModel),
}

impl Classifier {
    pub fn kind(&self) -> ModelKind {
        match self {
            Classifier::LogReg(_) => ModelKind::LogReg,
            Classifier::Svm(_) => ModelKind::Svm,
            Classifier::Nb(_) => ModelKind::Nb,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Classifier::LogReg(m) => m.params.n_features(),
            Classifier::Svm(m) => m.params.n_features(),
            Classifier::Nb(m) => m.n_features(),
        }
    }

    pub fn predict(&self, x: &SparseVector) -> Prediction {
        match self {
            Classifier::LogReg(m) => predict_logreg(m, x),
            Classifier::Svm(m) => predict_svm(m, x),
            Classifier::Nb(m) => predict_nb(m, x),
        }
    }

    /// The linear view of the model, if it has one.
    pub fn as_linear(&self) -> Option<&dyn LinearModel> {
        match self {
            Classifier::LogReg(m) => Some(m),
            Classifier::Svm(m) => Some(m),
            Classifier::Nb(_) => None,
        }
    }
}

/// Dense `C x V` weight matrix plus per-class biases.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    n_features: usize,
    weights: Vec<f64>,
    bias: [f64; NUM_CLASSES],
}

impl LinearParams {
    pub fn zeros(n_features: usize) -> Self {
        Self {
            n_features,
            weights: vec![0.0; NUM_CLASSES * n_features],
            bias: [0.0; NUM_CLASSES],
        }
    }

    /// `weights` is row-major, one row of `n_features` per class.
    pub fn new(n_features: usize, weights: Vec<f64>, bias: [f64; NUM_CLASSES]) -> Option<Self> {
        (weights.len() == NUM_CLASSES * n_features).then_some(Self {
            n_features,
            weights,
            bias,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, class: usize) -> &[f64] {
        &self.weights[class * self.n_features..(class + 1) * self.n_features]
    }

    pub fn row_mut(&mut self, class: usize) -> &mut [f64] {
        &mut self.weights[class * self.n_features..(class + 1) * self.n_features]
    }

    pub fn bias(&self) -> [f64; NUM_CLASSES] {
        self.bias
    }

    pub fn set_bias(&mut self, bias: [f64; NUM_CLASSES]) {
        self.bias = bias;
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_c . x + b_c` for every class.
    pub fn scores(&self, x: &SparseVector) -> [f64; NUM_CLASSES] {
        std::array::from_fn(|c| x.dot(self.row(c)) + self.bias[c])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn row_norm(&self, class: usize) -> f64 {
        self.row(class).iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }
}

/// Checks shapes and class coverage shared by every trainer.
pub(crate) fn check_training_data(
    x: &[SparseVector],
    y: &[SentimentLabel],
    n_features: usize,
) -> Result<[usize; NUM_CLASSES], ModelError> {
    if x.len() != y.len() {
        return Err(ModelError::DegenerateData(format!(
            "{} feature vectors but {} labels",
            x.len(),
            y.len()
        )));
    }
    if let Some(v) = x.iter().find(|v| v.min_dimension() > n_features) {
        return Err(ModelError::DegenerateData(format!(
            "feature index {} outside vocabulary of size {n_features}",
            v.min_dimension() - 1
        )));
    }
    if x.iter().any(|v| v.values().iter().any(|x| !x.is_finite())) {
        return Err(ModelError::NonFinite);
    }
    let counts = crate::corpus::class_counts(y);
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(ModelError::DegenerateData(format!(
            "class `{}` is absent from the training data",
            SentimentLabel::ALL[c]
        )));
    }
    Ok(counts)
}
