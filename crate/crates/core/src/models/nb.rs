use crate::corpus::{SentimentLabel, NUM_CLASSES};
use crate::features::SparseVector;

use super::{argmax, check_training_data, softmax, ModelError, Prediction, ScoreKind};

/// Multinomial naive Bayes over non-negative feature mass.
///
/// TF-IDF values are treated as fractional counts. With `alpha = 0` a term
/// never seen in a class gets log-likelihood `-inf` for that class.
#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    n_features: usize,
    log_prior: [f64; NUM_CLASSES],
    log_likelihood: Vec<f64>,
    alpha: f64,
}

impl NbModel {
    /// Reassembles a model; `log_likelihood` is row-major `C x V`.
    pub fn from_parts(
        n_features: usize,
        log_prior: [f64; NUM_CLASSES],
        log_likelihood: Vec<f64>,
        alpha: f64,
    ) -> Option<Self> {
        (log_likelihood.len() == NUM_CLASSES * n_features).then_some(Self {
            n_features,
            log_prior,
            log_likelihood,
            alpha,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn log_prior(&self) -> [f64; NUM_CLASSES] {
        self.log_prior
    }

    pub fn log_likelihood_row(&self, class: usize) -> &[f64] {
        &self.log_likelihood[class * self.n_features..(class + 1) * self.n_features]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Fits class priors `ln(n_c / N)` and smoothed likelihoods
/// `ln((S_ct + alpha) / (S_c + alpha * V))`, where `S_ct` is the summed value
/// of feature `t` over class-`c` documents.
///
/// A class whose documents carry no mass at all (possible only with
/// `alpha = 0`) gets the uniform likelihood `1/V`.
pub fn train_nb(
    x: &[SparseVector],
    y: &[SentimentLabel],
    n_features: usize,
    alpha: f64,
) -> Result<NbModel, ModelError> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(ModelError::InvalidConfig(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    let counts = check_training_data(x, y, n_features)?;
    if x.iter()
        .any(|v| v.values().iter().any(|&value| value < 0.0))
    {
        return Err(ModelError::DegenerateData(
            "naive Bayes needs non-negative features".into(),
        ));
    }
    if n_features == 0 {
        return Err(ModelError::DegenerateData("empty feature space".into()));
    }

    let mut mass = vec![0.0; NUM_CLASSES * n_features];
    for (v, &label) in x.iter().zip(y) {
        let row = &mut mass[label.ordinal() * n_features..(label.ordinal() + 1) * n_features];
        for (i, value) in v.iter() {
            row[i] += value;
        }
    }

    let total = y.len() as f64;
    let log_prior = counts.map(|n| (n as f64 / total).ln());
    let mut log_likelihood = vec![0.0; NUM_CLASSES * n_features];
    for c in 0..NUM_CLASSES {
        let row = &mass[c * n_features..(c + 1) * n_features];
        let denom = row.iter().sum::<f64>() + alpha * n_features as f64;
        let out = &mut log_likelihood[c * n_features..(c + 1) * n_features];
        if denom > 0.0 {
            for (o, s) in out.iter_mut().zip(row) {
                *o = ((s + alpha) / denom).ln();
            }
        } else {
            out.fill(-(n_features as f64).ln());
        }
    }
    Ok(NbModel {
        n_features,
        log_prior,
        log_likelihood,
        alpha,
    })
}

/// Joint log-likelihoods `ln P(c) + sum_t x_t ln P(t|c)` and their argmax.
/// Never returns NaN: an impossible class scores `-inf`.
pub fn predict_nb(model: &NbModel, x: &SparseVector) -> Prediction {
    let scores: [f64; NUM_CLASSES] = std::array::from_fn(|c| {
        let row = model.log_likelihood_row(c);
        let mut score = model.log_prior[c];
        for (i, value) in x.iter() {
            score += value * row[i];
        }
        if score.is_nan() {
            f64::NEG_INFINITY
        } else {
            score
        }
    });
    Prediction {
        label: argmax(&scores),
        scores,
        kind: ScoreKind::LogPosterior,
    }
}

/// Normalizes joint log-likelihoods into posterior probabilities. When every
/// class scores `-inf` the posterior is uniform.
pub fn posterior_probabilities(log_joint: &[f64; NUM_CLASSES]) -> [f64; NUM_CLASSES] {
    if log_joint.iter().all(|&s| s == f64::NEG_INFINITY) {
        return [1.0 / NUM_CLASSES as f64; NUM_CLASSES];
    }
    softmax(log_joint)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(pairs: &[(usize, f64)]) -> SparseVector {
        SparseVector::from_pairs(pairs.iter().copied())
    }

    /// Class 0 holds mass (2, 0), class 1 holds (0, 2); class 2 gets a tiny
    /// document on a third feature so every class is present.
    fn hand_fixture() -> (Vec<SparseVector>, Vec<SentimentLabel>) {
        let x = vec![
            sv(&[(0, 1.0)]),
            sv(&[(0, 1.0)]),
            sv(&[(1, 2.0)]),
            sv(&[(1, 0.0)]),
        ];
        let y = vec![
            SentimentLabel::Negatif,
            SentimentLabel::Negatif,
            SentimentLabel::Netral,
            SentimentLabel::Netral,
        ];
        (x, y)
    }

    #[test]
    fn two_feature_hand_example() {
        let (mut x, mut y) = hand_fixture();
        // third class on its own feature, keeps rows 0 and 1 over {a, b} only
        x.extend([sv(&[(2, 1.0)]), sv(&[(2, 1.0)])]);
        y.extend([SentimentLabel::Positif, SentimentLabel::Positif]);
        let model = train_nb(&x, &y, 3, 1.0).unwrap();
        // S_0 = (2, 0, 0), alpha V = 3: (3/5, 1/5, 1/5)
        let row0 = model.log_likelihood_row(0);
        assert!((row0[0] - (3.0f64 / 5.0).ln()).abs() < 1e-15);
        assert!((row0[1] - (1.0f64 / 5.0).ln()).abs() < 1e-15);

        let p = predict_nb(&model, &sv(&[(0, 1.0)]));
        assert_eq!(p.label, SentimentLabel::Negatif);
        for c in 0..3 {
            let sum: f64 = model.log_likelihood_row(c).iter().map(|v| v.exp()).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert!((model.log_prior().iter().map(|v| v.exp()).sum::<f64>() - 1.0).abs() < 1e-12);
        for lp in model.log_prior() {
            assert!((lp - (1.0f64 / 3.0).ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_likelihoods() {
        // vocab {a, b}: class0 mass (2, 0), class1 mass (0, 2), alpha 1
        let model = NbModel::from_parts(
            2,
            [(0.5f64).ln(), (0.5f64).ln(), f64::NEG_INFINITY],
            vec![
                (0.75f64).ln(),
                (0.25f64).ln(),
                (0.25f64).ln(),
                (0.75f64).ln(),
                (0.5f64).ln(),
                (0.5f64).ln(),
            ],
            1.0,
        )
        .unwrap();
        let x = vec![sv(&[(0, 2.0)]), sv(&[(1, 2.0)]), sv(&[(0, 1.0), (1, 1.0)])];
        let y = vec![
            SentimentLabel::Negatif,
            SentimentLabel::Netral,
            SentimentLabel::Positif,
        ];
        let trained = train_nb(&x, &y, 2, 1.0).unwrap();
        assert!((trained.log_likelihood_row(0)[0] - (0.75f64).ln()).abs() < 1e-15);
        assert!((trained.log_likelihood_row(0)[1] - (0.25f64).ln()).abs() < 1e-15);

        let a = sv(&[(0, 1.0)]);
        let p = predict_nb(&model, &a);
        assert_eq!(p.label, SentimentLabel::Negatif);

        // doubling the evidence widens the gap but keeps the winner
        let p2 = predict_nb(&model, &a.scaled(2.0));
        assert_eq!(p2.label, SentimentLabel::Negatif);
        let gap1 = p.scores[0] - p.scores[1];
        let gap2 = p2.scores[0] - p2.scores[1];
        assert!((gap2 - 2.0 * gap1).abs() < 1e-12);
    }

    #[test]
    fn empty_input_uses_priors() {
        let x = vec![
            sv(&[(0, 1.0)]),
            sv(&[(0, 1.0)]),
            sv(&[(1, 1.0)]),
            sv(&[(0, 1.0)]),
        ];
        let y = vec![
            SentimentLabel::Netral,
            SentimentLabel::Netral,
            SentimentLabel::Negatif,
            SentimentLabel::Positif,
        ];
        let model = train_nb(&x, &y, 2, 1.0).unwrap();
        let p = predict_nb(&model, &SparseVector::empty());
        assert_eq!(p.label, SentimentLabel::Netral);
        assert_eq!(p.scores, model.log_prior());
    }

    #[test]
    fn zero_alpha_never_yields_nan() {
        let x = vec![sv(&[(0, 1.0)]), sv(&[(1, 1.0)]), sv(&[(1, 1.0)])];
        let y = vec![
            SentimentLabel::Negatif,
            SentimentLabel::Netral,
            SentimentLabel::Positif,
        ];
        let model = train_nb(&x, &y, 3, 0.0).unwrap();
        assert_eq!(model.log_likelihood_row(0)[1], f64::NEG_INFINITY);

        // feature 2 never occurs: all classes impossible
        let p = predict_nb(&model, &sv(&[(2, 1.0)]));
        assert!(p.scores.iter().all(|s| *s == f64::NEG_INFINITY));
        assert_eq!(p.label, SentimentLabel::Negatif);
        assert_eq!(posterior_probabilities(&p.scores), [1.0 / 3.0; 3]);

        // feature 0 only in class 0
        let p = predict_nb(&model, &sv(&[(0, 0.5)]));
        assert_eq!(p.label, SentimentLabel::Negatif);
        assert!(p.scores.iter().all(|s| !s.is_nan()));

        // a zero-mass term that is absent at predict time costs nothing
        let p = predict_nb(&model, &sv(&[(1, 1.0)]));
        assert!(p.scores[1].is_finite());
    }

    #[test]
    fn massless_class_gets_uniform_likelihood() {
        let x = vec![sv(&[(0, 1.0)]), SparseVector::empty(), sv(&[(1, 1.0)])];
        let y = vec![
            SentimentLabel::Negatif,
            SentimentLabel::Netral,
            SentimentLabel::Positif,
        ];
        let model = train_nb(&x, &y, 2, 0.0).unwrap();
        assert!(model
            .log_likelihood_row(1)
            .iter()
            .all(|v| (v - (0.5f64).ln()).abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_alpha_and_negative_features() {
        let (x, y) = hand_fixture();
        assert!(matches!(
            train_nb(&x, &y, 2, -1.0),
            Err(ModelError::InvalidConfig(_))
        ));
        let x = vec![sv(&[(0, -1.0)]), sv(&[(0, 1.0)]), sv(&[(0, 1.0)])];
        let y = SentimentLabel::ALL.to_vec();
        assert!(matches!(
            train_nb(&x, &y, 1, 1.0),
            Err(ModelError::DegenerateData(_))
        ));
    }

    #[test]
    fn missing_class_is_degenerate() {
        let (x, y) = hand_fixture();
        assert!(matches!(
            train_nb(&x, &y, 2, 1.0),
            Err(ModelError::DegenerateData(_))
        ));
    }
}
