use std::thread;

use crate::corpus::{SentimentLabel, NUM_CLASSES};
use crate::features::SparseVector;

use super::optim::{minimize, Objective, TrainTrace};
use super::{
    argmax, check_training_data, ClassWeights, LinearParams, ModelError, Prediction, ScoreKind,
    TrainConfig,
};

/// One-vs-rest linear SVM; row `c` of the parameters separates class `c`
/// from the other two.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub params: LinearParams,
    pub lambda: f64,
}

/// Binary squared-hinge objective for one class against the rest:
/// `(lambda/2) ||w||^2 + (1/N) sum_i w[y_i] * max(0, 1 - t_i (w.x_i + b))^2`
/// with `t_i = +1` when `y_i` is the positive class and `-1` otherwise.
///
/// Parameters are the `V` weights followed by the bias.
pub struct SquaredHinge<'a> {
    x: &'a [SparseVector],
    y: &'a [SentimentLabel],
    positive: SentimentLabel,
    n_features: usize,
    weights: Option<ClassWeights>,
    lambda: f64,
}

impl<'a> SquaredHinge<'a> {
    pub fn new(
        x: &'a [SparseVector],
        y: &'a [SentimentLabel],
        positive: SentimentLabel,
        n_features: usize,
        weights: Option<ClassWeights>,
        lambda: f64,
    ) -> Self {
        assert_eq!(x.len(), y.len());
        Self {
            x,
            y,
            positive,
            n_features,
            weights,
            lambda,
        }
    }

    fn target(&self, label: SentimentLabel) -> f64 {
        if label == self.positive {
            1.0
        } else {
            -1.0
        }
    }

    fn penalty(&self, params: &[f64]) -> f64 {
        0.5 * self.lambda * params[..self.n_features].iter().map(|v| v * v).sum::<f64>()
    }
}

impl Objective for SquaredHinge<'_> {
    fn dim(&self) -> usize {
        self.n_features + 1
    }

    fn value(&self, params: &[f64]) -> f64 {
        let (w, b) = params.split_at(self.n_features);
        let mut total = 0.0;
        for (x, &label) in self.x.iter().zip(self.y) {
            let margin = 1.0 - self.target(label) * (x.dot(w) + b[0]);
            if margin > 0.0 {
                let loss = margin * margin;
                total += match self.weights {
                    Some(cw) => cw.get(label) * loss,
                    None => loss,
                };
            }
        }
        total / self.x.len() as f64 + self.penalty(params)
    }

    fn value_and_gradient(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let v = self.n_features;
        grad.fill(0.0);
        let (w, b) = params.split_at(v);
        let mut total = 0.0;
        for (x, &label) in self.x.iter().zip(self.y) {
            let t = self.target(label);
            let margin = 1.0 - t * (x.dot(w) + b[0]);
            if margin <= 0.0 {
                continue;
            }
            let loss = margin * margin;
            let mut coef = -2.0 * margin * t;
            match self.weights {
                Some(cw) => {
                    total += cw.get(label) * loss;
                    coef *= cw.get(label);
                }
                None => total += loss,
            }
            for (i, xi) in x.iter() {
                grad[i] += coef * xi;
            }
            grad[v] += coef;
        }
        let n = self.x.len() as f64;
        for (i, g) in grad.iter_mut().enumerate() {
            *g /= n;
            if i < v {
                *g += self.lambda * params[i];
            }
        }
        total / n + self.penalty(params)
    }
}

/// Trains the three one-vs-rest subproblems, concurrently. Each subproblem is
/// deterministic on its own, so the result does not depend on scheduling.
///
/// Returns one trace per class, in ordinal order.
pub fn train_svm_ovr(
    x: &[SparseVector],
    y: &[SentimentLabel],
    n_features: usize,
    weights: &ClassWeights,
    config: &TrainConfig,
) -> Result<(SvmModel, Vec<TrainTrace>), ModelError> {
    config.validate()?;
    check_training_data(x, y, n_features)?;

    let results: Vec<Result<(Vec<f64>, TrainTrace), ModelError>> = thread::scope(|scope| {
        let handles: Vec<_> = SentimentLabel::ALL
            .iter()
            .map(|&class| {
                scope.spawn(move || {
                    let objective =
                        SquaredHinge::new(x, y, class, n_features, Some(*weights), config.lambda);
                    minimize(
                        &objective,
                        vec![0.0; n_features + 1],
                        config.max_iter,
                        config.tol,
                    )
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("SVM worker panicked"))
            .collect()
    });

    let mut params = LinearParams::zeros(n_features);
    let mut bias = [0.0; NUM_CLASSES];
    let mut traces = Vec::with_capacity(NUM_CLASSES);
    for (c, result) in results.into_iter().enumerate() {
        let (theta, trace) = result?;
        params.row_mut(c).copy_from_slice(&theta[..n_features]);
        bias[c] = theta[n_features];
        traces.push(trace);
    }
    params.set_bias(bias);
    if !params.is_finite() {
        return Err(ModelError::NonFinite);
    }
    Ok((
        SvmModel {
            params,
            lambda: config.lambda,
        },
        traces,
    ))
}

/// Decision scores `w_c . x + b_c` and their argmax.
pub fn predict_svm(model: &SvmModel, x: &SparseVector) -> Prediction {
    let scores = model.params.scores(x);
    Prediction {
        label: argmax(&scores),
        scores,
        kind: ScoreKind::Margin,
    }
}
