use crate::corpus::{SentimentLabel, NUM_CLASSES};
use crate::features::SparseVector;

use super::optim::{minimize, Objective, TrainTrace};
use super::{
    argmax, check_training_data, ClassWeights, LinearParams, ModelError, Prediction, ScoreKind,
    TrainConfig,
};

/// Multinomial (softmax) logistic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub params: LinearParams,
    pub lambda: f64,
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64; NUM_CLASSES]) -> [f64; NUM_CLASSES] {
    let max = logits.iter().fold(f64::NEG_INFINITY, |m, &z| m.max(z));
    let exps = logits.map(|z| (z - max).exp());
    let sum: f64 = exps.iter().sum();
    exps.map(|e| e / sum)
}

/// `(1/N) sum_i w[y_i] * CE(softmax(W x_i + b), y_i) + (lambda/2) ||W||_F^2`.
///
/// Parameters are laid out as the `C x V` weight matrix row by row, followed
/// by the `C` biases. With `weights = None` every sample counts once.
pub struct SoftmaxCrossEntropy<'a> {
    x: &'a [SparseVector],
    y: &'a [SentimentLabel],
    n_features: usize,
    weights: Option<ClassWeights>,
    lambda: f64,
}

impl<'a> SoftmaxCrossEntropy<'a> {
    pub fn new(
        x: &'a [SparseVector],
        y: &'a [SentimentLabel],
        n_features: usize,
        weights: Option<ClassWeights>,
        lambda: f64,
    ) -> Self {
        assert_eq!(x.len(), y.len());
        Self {
            x,
            y,
            n_features,
            weights,
            lambda,
        }
    }

    fn logits(&self, params: &[f64], x: &SparseVector) -> [f64; NUM_CLASSES] {
        let v = self.n_features;
        let bias = &params[NUM_CLASSES * v..];
        std::array::from_fn(|c| x.dot(&params[c * v..(c + 1) * v]) + bias[c])
    }

    fn penalty(&self, params: &[f64]) -> f64 {
        let w = &params[..NUM_CLASSES * self.n_features];
        0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn sample_weight(&self, label: SentimentLabel) -> Option<f64> {
        self.weights.map(|w| w.get(label))
    }
}

fn log_sum_exp(z: &[f64; NUM_CLASSES]) -> f64 {
    let max = z.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl Objective for SoftmaxCrossEntropy<'_> {
    fn dim(&self) -> usize {
        NUM_CLASSES * (self.n_features + 1)
    }

    fn value(&self, params: &[f64]) -> f64 {
        let mut total = 0.0;
        for (x, &label) in self.x.iter().zip(self.y) {
            let z = self.logits(params, x);
            let ce = log_sum_exp(&z) - z[label.ordinal()];
            total += match self.sample_weight(label) {
                Some(w) => w * ce,
                None => ce,
            };
        }
        total / self.x.len() as f64 + self.penalty(params)
    }

    fn value_and_gradient(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let v = self.n_features;
        grad.fill(0.0);
        let mut total = 0.0;
        for (x, &label) in self.x.iter().zip(self.y) {
            let z = self.logits(params, x);
            let lse = log_sum_exp(&z);
            let ce = lse - z[label.ordinal()];
            let w = self.sample_weight(label);
            total += match w {
                Some(w) => w * ce,
                None => ce,
            };
            for c in 0..NUM_CLASSES {
                let mut coef = (z[c] - lse).exp();
                if c == label.ordinal() {
                    coef -= 1.0;
                }
                if let Some(w) = w {
                    coef *= w;
                }
                if coef == 0.0 {
                    continue;
                }
                let row = &mut grad[c * v..(c + 1) * v];
                for (i, xi) in x.iter() {
                    row[i] += coef * xi;
                }
                grad[NUM_CLASSES * v + c] += coef;
            }
        }
        let n = self.x.len() as f64;
        for (c, g) in grad.iter_mut().enumerate() {
            *g /= n;
            if c < NUM_CLASSES * v {
                *g += self.lambda * params[c];
            }
        }
        total / n + self.penalty(params)
    }
}

/// Trains weighted multinomial logistic regression from all-zero parameters.
pub fn train_logreg(
    x: &[SparseVector],
    y: &[SentimentLabel],
    n_features: usize,
    weights: &ClassWeights,
    config: &TrainConfig,
) -> Result<(LogRegModel, TrainTrace), ModelError> {
    config.validate()?;
    check_training_data(x, y, n_features)?;
    let objective = SoftmaxCrossEntropy::new(x, y, n_features, Some(*weights), config.lambda);
    let start = vec![0.0; objective.dim()];
    let (theta, trace) = minimize(&objective, start, config.max_iter, config.tol)?;

    let split = NUM_CLASSES * n_features;
    let bias = [theta[split], theta[split + 1], theta[split + 2]];
    let mut weights = theta;
    weights.truncate(split);
    let params = LinearParams::new(n_features, weights, bias).expect("shape fixed by objective");
    if !params.is_finite() {
        return Err(ModelError::NonFinite);
    }
    Ok((
        LogRegModel {
            params,
            lambda: config.lambda,
        },
        trace,
    ))
}

/// Class probabilities `softmax(W x + b)` and their argmax.
pub fn predict_logreg(model: &LogRegModel, x: &SparseVector) -> Prediction {
    let probs = softmax(&model.params.scores(x));
    Prediction {
        label: argmax(&probs),
        scores: probs,
        kind: ScoreKind::Probability,
    }
}
