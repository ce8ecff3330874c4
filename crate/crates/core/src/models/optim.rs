//! Deterministic full-batch gradient descent with Armijo backtracking.
//!
//! Each iteration tries a Barzilai-Borwein step length and halves it until
//! the sufficient-decrease condition holds, so accepted losses never
//! increase. No randomness is involved anywhere.

use super::ModelError;

/// A differentiable training loss over a flat parameter vector.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn value(&self, params: &[f64]) -> f64;

    /// Returns the loss and writes the gradient into `grad`.
    fn value_and_gradient(&self, params: &[f64], grad: &mut [f64]) -> f64;
}

/// What happened during one optimization run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainTrace {
    /// Number of accepted steps.
    pub iterations: usize,
    /// True when the gradient infinity norm fell below the tolerance.
    pub converged: bool,
    /// Loss at the start and after every accepted step.
    pub losses: Vec<f64>,
    pub final_gradient_norm: f64,
}

impl TrainTrace {
    pub fn initial_loss(&self) -> f64 {
        self.losses.first().copied().unwrap_or(f64::NAN)
    }

    pub fn final_loss(&self) -> f64 {
        self.losses.last().copied().unwrap_or(f64::NAN)
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const MIN_STEP: f64 = 1e-12;
const MAX_STEP: f64 = 1e12;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, g| m.max(g.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `objective` from `start`.
///
/// Stops when the gradient infinity norm is below `tol`, after `max_iter`
/// accepted steps, or when no step length yields sufficient decrease.
pub fn minimize(
    objective: &dyn Objective,
    start: Vec<f64>,
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<f64>, TrainTrace), ModelError> {
    let n = objective.dim();
    assert_eq!(start.len(), n, "start point has the wrong dimension");

    let mut x = start;
    let mut grad = vec![0.0; n];
    let mut loss = objective.value_and_gradient(&x, &mut grad);
    if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(ModelError::NonFinite);
    }

    let mut trace = TrainTrace {
        losses: vec![loss],
        ..TrainTrace::default()
    };
    let mut candidate = vec![0.0; n];
    let mut next_grad = vec![0.0; n];
    let mut step = 1.0 / inf_norm(&grad).max(1.0);

    loop {
        let gnorm = inf_norm(&grad);
        trace.final_gradient_norm = gnorm;
        if gnorm < tol {
            trace.converged = true;
            break;
        }
        if trace.iterations >= max_iter {
            break;
        }

        let slope = dot(&grad, &grad);
        let mut accepted = None;
        let mut t = step;
        for _ in 0..MAX_HALVINGS {
            for ((c, xi), gi) in candidate.iter_mut().zip(&x).zip(&grad) {
                *c = xi - t * gi;
            }
            let trial = objective.value(&candidate);
            if trial.is_finite() && trial <= loss - ARMIJO * t * slope {
                accepted = Some(t);
                break;
            }
            t *= 0.5;
        }
        let Some(t) = accepted else {
            // No representable decrease remains along the gradient.
            break;
        };

        let next_loss = objective.value_and_gradient(&candidate, &mut next_grad);
        if !next_loss.is_finite() || next_grad.iter().any(|g| !g.is_finite()) {
            return Err(ModelError::NonFinite);
        }

        // Barzilai-Borwein length for the next trial step.
        let mut ss = 0.0;
        let mut sy = 0.0;
        for i in 0..n {
            let s = candidate[i] - x[i];
            let y = next_grad[i] - grad[i];
            ss += s * s;
            sy += s * y;
        }
        step = if sy > 0.0 && ss > 0.0 {
            (ss / sy).clamp(MIN_STEP, MAX_STEP)
        } else {
            (2.0 * t).min(MAX_STEP)
        };

        std::mem::swap(&mut x, &mut candidate);
        std::mem::swap(&mut grad, &mut next_grad);
        loss = next_loss;
        trace.iterations += 1;
        trace.losses.push(loss);
    }

    Ok((x, trace))
}
