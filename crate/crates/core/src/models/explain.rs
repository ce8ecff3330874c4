use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::features::{SparseVector, Vocabulary};

use super::{predict_logreg, predict_svm, LinearParams, LogRegModel, Prediction, SvmModel};

/// Models whose class scores are `w_c . x + b_c`.
pub trait LinearModel {
    fn params(&self) -> &LinearParams;

    fn predict(&self, x: &SparseVector) -> Prediction;
}

impl LinearModel for LogRegModel {
    fn params(&self) -> &LinearParams {
        &self.params
    }

    fn predict(&self, x: &SparseVector) -> Prediction {
        predict_logreg(self, x)
    }
}

impl LinearModel for SvmModel {
    fn params(&self) -> &LinearParams {
        &self.params
    }

    fn predict(&self, x: &SparseVector) -> Prediction {
        predict_svm(self, x)
    }
}

/// One term's share of the predicted class score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub term: String,
    pub contribution: f64,
}

/// Top `k` terms of `x` by `w_c,t * x_t` for the predicted class `c`,
/// largest first, ties broken by term. Zero contributions are left out.
pub fn explain_linear<M: LinearModel + ?Sized>(
    model: &M,
    x: &SparseVector,
    vocab: &Vocabulary,
    k: usize,
) -> Vec<Contribution> {
    let class = model.predict(x).label.ordinal();
    let row = model.params().row(class);
    let mut out: Vec<Contribution> = x
        .iter()
        .filter_map(|(i, value)| {
            let contribution = row[i] * value;
            (contribution != 0.0).then(|| Contribution {
                term: vocab.term(i).unwrap_or("<unknown>").to_string(),
                contribution,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.contribution
            .partial_cmp(&a.contribution)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.term.cmp(&b.term))
    });
    out.truncate(k);
    out
}
