//! One-vs-rest L2-regularized logistic regression over embedding features.
//!
//! Fitting is full-batch gradient descent with Nesterov momentum (the
//! momentum term buys the convergence rate that plain steps cannot reach
//! within the iteration budget) to gradient-norm tolerance 1e-5, capped at
//! 500 iterations. The bias coordinate is never regularized.

use crate::eval::labels::{f1_scores, LabeledNodes, FOLD_COUNT};
use crate::sgns::embedding::Matrix;
use crate::sgns::loss::sigmoid;
use crate::{Error, Result};

pub const GRAD_TOL: f64 = 1e-5;
pub const MAX_ITERS: usize = 500;
pub const DEFAULT_LAMBDA: f64 = 1.0;

/// ℓ regressors, one weight vector of d+1 entries each (bias last).
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    weights: Vec<Vec<f64>>,
    dim: usize,
}

impl ClassifierModel {
    pub fn label_count(&self) -> usize {
        self.weights.len()
    }

    /// Raw per-label margins for one node; monotone in the class
    /// probability, which is all ranking needs.
    pub fn scores(&self, features: &Matrix, node: u32) -> Vec<f64> {
        let x = features.row(node);
        self.weights
            .iter()
            .map(|w| {
                w[..self.dim]
                    .iter()
                    .zip(x)
                    .map(|(wi, &xi)| wi * xi as f64)
                    .sum::<f64>()
                    + w[self.dim]
            })
            .collect()
    }

    /// The `k` highest-scoring labels; score ties break toward the smaller
    /// label id so predictions are a pure function of the scores.
    pub fn predict_topk(&self, features: &Matrix, node: u32, k: usize) -> Vec<u32> {
        let scores = self.scores(features, node);
        let mut order: Vec<u32> = (0..scores.len() as u32).collect();
        order.sort_by(|&a, &b| {
            scores[b as usize]
                .total_cmp(&scores[a as usize])
                .then(a.cmp(&b))
        });
        order.truncate(k);
        order
    }
}

/// Mean logistic-loss gradient at `w`, without the regularization term.
fn data_gradient(
    w: &[f64],
    features: &Matrix,
    nodes: &[u32],
    positive: &[bool],
    out: &mut [f64],
) {
    let d = w.len() - 1;
    let m = nodes.len() as f64;
    out.iter_mut().for_each(|g| *g = 0.0);
    for (i, &u) in nodes.iter().enumerate() {
        let x = features.row(u);
        let z: f64 =
            w[..d].iter().zip(x).map(|(wi, &xi)| wi * xi as f64).sum::<f64>() + w[d];
        let err = sigmoid(z) - if positive[i] { 1.0 } else { 0.0 };
        for (g, &xi) in out[..d].iter_mut().zip(x) {
            *g += err * xi as f64;
        }
        out[d] += err;
    }
    for g in out.iter_mut() {
        *g /= m;
    }
}

/// Full objective gradient: data term plus λ/m·w on everything but the
/// bias. Audit twin of the trainer's stop rule, used to check stationarity
/// of returned weights.
#[cfg(test)]
fn gradient(
    w: &[f64],
    features: &Matrix,
    nodes: &[u32],
    positive: &[bool],
    lambda: f64,
    out: &mut [f64],
) {
    data_gradient(w, features, nodes, positive, out);
    let d = w.len() - 1;
    let m = nodes.len() as f64;
    for (g, wi) in out[..d].iter_mut().zip(w) {
        *g += lambda / m * wi;
    }
}

#[cfg(test)]
fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fits one one-vs-rest regressor per label on the given training nodes.
/// Labels with no positive (or no negative) training example get a
/// constant-score regressor at the prior's log-odds.
pub fn train_logreg_ovr(
    features: &Matrix,
    truth: &LabeledNodes,
    train_nodes: &[u32],
    lambda: f64,
) -> Result<ClassifierModel> {
    if train_nodes.is_empty() {
        return Err(Error::InvalidConfig("classifier needs at least one training node".into()));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!("regularization must be >= 0, got {lambda}")));
    }
    let d = features.dim();
    for &u in train_nodes {
        if features.row(u).iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step: u as u64, lr: 0.0 });
        }
    }

    // Fixed step 1/L from the trace bound on the logistic Hessian:
    // L ≤ ¼·mean‖x̃‖² (x̃ carries the bias coordinate). The quadratic
    // penalty is applied as an exact proximal shrink instead of through the
    // gradient, so an arbitrarily large λ cannot stall the step size.
    let m = train_nodes.len() as f64;
    let mean_sq = train_nodes
        .iter()
        .map(|&u| features.row(u).iter().map(|&x| (x as f64).powi(2)).sum::<f64>() + 1.0)
        .sum::<f64>()
        / m;
    let step = 4.0 / mean_sq;
    let shrink = 1.0 / (1.0 + step * lambda / m);

    let mut weights = Vec::with_capacity(truth.label_count());
    let mut grad = vec![0.0; d + 1];
    for label in 0..truth.label_count() as u32 {
        let positive: Vec<bool> =
            train_nodes.iter().map(|&u| truth.of(u).contains(&label)).collect();
        let pos = positive.iter().filter(|&&p| p).count();
        if pos == 0 || pos == train_nodes.len() {
            // Degenerate label: constant score at the clamped prior.
            let p = (pos as f64 / m).clamp(1e-6, 1.0 - 1e-6);
            let mut w = vec![0.0; d + 1];
            w[d] = (p / (1.0 - p)).ln();
            weights.push(w);
            continue;
        }

        let mut w = vec![0.0; d + 1];
        let mut prev_w = w.clone();
        for iter in 0..MAX_ITERS {
            // Momentum lookahead with the standard (t−1)/(t+2) schedule.
            let beta = iter as f64 / (iter as f64 + 3.0);
            let lookahead: Vec<f64> = w
                .iter()
                .zip(&prev_w)
                .map(|(&cur, &old)| cur + beta * (cur - old))
                .collect();
            data_gradient(&lookahead, features, train_nodes, &positive, &mut grad);
            // Stationarity of the full objective at the lookahead point.
            let full_sq: f64 = grad[..d]
                .iter()
                .zip(&lookahead)
                .map(|(&g, &wi)| (g + lambda / m * wi).powi(2))
                .sum::<f64>()
                + grad[d] * grad[d];
            if full_sq.sqrt() < GRAD_TOL {
                w = lookahead;
                break;
            }
            prev_w = std::mem::take(&mut w);
            w = lookahead
                .iter()
                .zip(&grad)
                .enumerate()
                .map(|(i, (&l, &g))| {
                    let v = l - step * g;
                    if i < d {
                        v * shrink
                    } else {
                        v
                    }
                })
                .collect();
        }
        weights.push(w);
    }
    Ok(ClassifierModel { weights, dim: d })
}

/// Scores one test fold: each node predicts as many labels as it truly has
/// (top-k by margin), then the predictions are tabulated into micro/macro
/// F1.
pub fn predict_and_score(
    model: &ClassifierModel,
    features: &Matrix,
    truth: &LabeledNodes,
    test_nodes: &[u32],
) -> (f64, f64) {
    let predictions: Vec<Vec<u32>> = test_nodes
        .iter()
        .map(|&u| model.predict_topk(features, u, truth.of(u).len()))
        .collect();
    f1_scores(truth, test_nodes, &predictions)
}

/// Full 5-fold protocol: train on four folds, score the fifth, average the
/// ten scores. Returns (micro, macro).
pub fn nc_cross_validate(
    features: &Matrix,
    truth: &LabeledNodes,
    lambda: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    let folds = truth.assign_folds(seed);
    let (mut micro_sum, mut macro_sum) = (0.0, 0.0);
    for test_idx in 0..FOLD_COUNT {
        let train_nodes: Vec<u32> = folds
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != test_idx)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        let model = train_logreg_ovr(features, truth, &train_nodes, lambda)?;
        let (micro, macro_) = predict_and_score(&model, features, truth, &folds[test_idx]);
        micro_sum += micro;
        macro_sum += macro_;
    }
    Ok((micro_sum / FOLD_COUNT as f64, macro_sum / FOLD_COUNT as f64))
}
