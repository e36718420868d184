//! L2-regularized linear SVM trained by dual coordinate descent.
//!
//! Solves `min_w 0.5 ||w||^2 + C sum_i max(0, 1 - y_i (w'x_i + b))` through
//! its box-constrained dual, one coordinate at a time, with the bias handled
//! as an augmented constant feature (so the bias is regularized, as in
//! liblinear with `bias = 1`). Training stops when the duality gap drops
//! below `1e-6 * max(1, |primal|)`. The per-epoch coordinate order is a
//! seeded shuffle, making results deterministic for a given seed and input
//! order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Relative duality-gap tolerance at which training stops.
pub const SVM_TOLERANCE: f64 = 1e-6;
const MAX_EPOCHS: usize = 10_000;

/// A trained linear decision function `sign(w'x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub cost: f64,
}

impl LinearModel {
    pub fn decision_value(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} features for {} weights",
                    features.len(),
                    self.weights.len()
                ),
            });
        }
        let mut v = self.bias;
        for (w, x) in self.weights.iter().zip(features) {
            v += w * x;
        }
        Ok(v)
    }
}

/// Hard label from a decision value; zero maps to +1.
pub fn predict_label(model: &LinearModel, features: &[f64]) -> Result<i8> {
    Ok(if model.decision_value(features)? >= 0.0 { 1 } else { -1 })
}

/// Trains on feature rows and +/-1 labels.
pub fn train_linear(
    features: &[Vec<f64>],
    labels: &[i8],
    cost: f64,
    rng_seed: u64,
) -> Result<LinearModel> {
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            context: format!("{} feature rows, {} labels", features.len(), labels.len()),
        });
    }
    if !(cost > 0.0) || !cost.is_finite() {
        return Err(Error::InvalidConfig(format!("svm cost must be positive, got {cost}")));
    }
    let dim = features[0].len();
    if dim == 0 {
        return Err(Error::DimensionMismatch { context: "zero-dimensional features".into() });
    }
    for (i, row) in features.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                context: format!("feature row {i} has {} values, expected {dim}", row.len()),
            });
        }
        if !row.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteSamples { context: format!("feature row {i}") });
        }
    }
    for &l in labels {
        if l != -1 && l != 1 {
            return Err(Error::InvalidLabel { value: l as i32 });
        }
    }
    if labels.iter().all(|&l| l == 1) || labels.iter().all(|&l| l == -1) {
        return Err(Error::SingleClassTrainingSet);
    }

    let n = features.len();
    let aug = dim + 1; // trailing constant 1 carries the bias
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    // Q_ii = ||x_i||^2 + 1
    let qd: Vec<f64> = features
        .iter()
        .map(|row| row.iter().map(|v| v * v).sum::<f64>() + 1.0)
        .collect();

    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; aug];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seed::rng(rng_seed, seed::Domain::SvmShuffle, &[]);

    let dot = |w: &[f64], row: &[f64]| -> f64 {
        let mut v = w[dim]; // bias feature is constant 1
        for (wk, xk) in w[..dim].iter().zip(row) {
            v += wk * xk;
        }
        v
    };

    for _epoch in 0..MAX_EPOCHS {
        seed::shuffle(&mut order, &mut rng);
        for &i in &order {
            let row = &features[i];
            let g = y[i] * dot(&w, row) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= cost {
                g.max(0.0)
            } else {
                g
            };
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, cost);
                let delta = (alpha[i] - old) * y[i];
                if delta != 0.0 {
                    for (wk, xk) in w[..dim].iter_mut().zip(row) {
                        *wk += delta * xk;
                    }
                    w[dim] += delta;
                }
            }
        }

        let w_norm_sq: f64 = w.iter().map(|v| v * v).sum();
        let hinge: f64 = features
            .iter()
            .zip(&y)
            .map(|(row, yi)| (1.0 - yi * dot(&w, row)).max(0.0))
            .sum();
        let primal = 0.5 * w_norm_sq + cost * hinge;
        let dual = alpha.iter().sum::<f64>() - 0.5 * w_norm_sq;
        if primal - dual <= SVM_TOLERANCE * primal.abs().max(1.0) {
            break;
        }
    }

    Ok(LinearModel { weights: w[..dim].to_vec(), bias: w[dim], cost })
}
