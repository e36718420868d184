//! Common spatial patterns: spatial filters that maximize the variance ratio
//! between two classes, and the log-variance features built from them.
//!
//! Fitting averages trace-normalized per-trial covariances per class,
//! regularizes each mean with `1e-6 * trace` on the diagonal, and solves the
//! generalized eigenproblem `S1 w = mu (S1 + S2) w` by whitening `S1 + S2`.
//! The model keeps the `d/2` largest- and `d/2` smallest-eigenvalue filters;
//! eigenvalues are stored in descending order and lie in [0, 1].

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dsp::{bandpass, trial_scatter};
use crate::error::{Error, Result};
use crate::linalg::{quad_form, sym_eigen};
use crate::types::{Band, TrialMatrix};

/// Diagonal loading factor applied to each class covariance mean.
pub const CSP_REGULARIZATION: f64 = 1e-6;

/// A fitted CSP transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CspModel {
    /// `csp_dim x n_channels`; row `j` is filter `w_j`.
    filters: Array2<f64>,
    /// Generalized eigenvalues paired with the filter rows, descending.
    eigenvalues: Vec<f64>,
    n_channels: usize,
    csp_dim: usize,
}

impl CspModel {
    pub fn new(filters: Array2<f64>, eigenvalues: Vec<f64>) -> Result<Self> {
        let csp_dim = filters.nrows();
        let n_channels = filters.ncols();
        if csp_dim < 2 || csp_dim % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "csp_dim must be even and >= 2, got {csp_dim}"
            )));
        }
        if csp_dim > n_channels {
            return Err(Error::InsufficientChannels { got: n_channels, required: csp_dim });
        }
        if eigenvalues.len() != csp_dim {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} eigenvalues for {} filters",
                    eigenvalues.len(),
                    csp_dim
                ),
            });
        }
        if !filters.iter().all(|v| v.is_finite()) || !eigenvalues.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteSamples { context: "CSP model".into() });
        }
        Ok(Self { filters, eigenvalues, n_channels, csp_dim })
    }

    pub fn filters(&self) -> &Array2<f64> {
        &self.filters
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn csp_dim(&self) -> usize {
        self.csp_dim
    }
}

/// Mean of trace-normalized trial scatters. Errors on zero-power trials.
fn mean_normalized_covariance<'a, I>(scatters: I) -> Result<Array2<f64>>
where
    I: IntoIterator<Item = &'a Array2<f64>>,
{
    let mut mean: Option<Array2<f64>> = None;
    let mut count = 0usize;
    for s in scatters {
        let n = s.nrows();
        let trace: f64 = (0..n).map(|i| s[[i, i]]).sum();
        if !(trace > 0.0) || !trace.is_finite() {
            return Err(Error::DegenerateTrial {
                context: format!("zero or non-finite signal power (trace = {trace})"),
            });
        }
        let normalized = s / trace;
        match &mut mean {
            None => mean = Some(normalized),
            Some(m) => *m += &normalized,
        }
        count += 1;
    }
    match mean {
        Some(m) => Ok(m / count as f64),
        None => Err(Error::SingleClassTrainingSet),
    }
}

/// Fits CSP from per-class mean covariances (trace ~ 1 each). This is the
/// shared core of every fitting path; `fit_csp` feeds it per-trial scatters.
pub fn fit_csp_from_covariances(
    mean_pos: &Array2<f64>,
    mean_neg: &Array2<f64>,
    csp_dim: usize,
) -> Result<CspModel> {
    let c = mean_pos.nrows();
    if mean_pos.ncols() != c || mean_neg.nrows() != c || mean_neg.ncols() != c {
        return Err(Error::DimensionMismatch {
            context: "class covariances must be square and same size".into(),
        });
    }
    if csp_dim < 2 || csp_dim % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "csp_dim must be even and >= 2, got {csp_dim}"
        )));
    }
    if csp_dim > c {
        return Err(Error::InsufficientChannels { got: c, required: csp_dim });
    }

    // Diagonal loading keeps rank-deficient means invertible.
    let mut s_pos = mean_pos.clone();
    let mut s_neg = mean_neg.clone();
    for (s, src) in [(&mut s_pos, mean_pos), (&mut s_neg, mean_neg)] {
        let trace: f64 = (0..c).map(|i| src[[i, i]]).sum();
        let lambda = CSP_REGULARIZATION * trace;
        for i in 0..c {
            s[[i, i]] += lambda;
        }
    }

    // Whiten the composite covariance M = S+ + S-.
    let m = &s_pos + &s_neg;
    let m_eig = sym_eigen(&m)?;
    if m_eig.values.iter().any(|&v| v <= 0.0) {
        return Err(Error::DegenerateTrial {
            context: "composite covariance not positive definite".into(),
        });
    }
    // P[i, k] = U[k, i] / sqrt(lambda_i), so P M P' = I.
    let mut p = Array2::<f64>::zeros((c, c));
    for i in 0..c {
        let inv_sqrt = 1.0 / m_eig.values[i].sqrt();
        for k in 0..c {
            p[[i, k]] = m_eig.vectors[[k, i]] * inv_sqrt;
        }
    }

    // G = P S+ P', symmetric with eigenvalues in [0, 1].
    let g_raw = p.dot(&s_pos).dot(&p.t());
    let mut g = Array2::<f64>::zeros((c, c));
    for i in 0..c {
        for j in 0..c {
            g[[i, j]] = 0.5 * (g_raw[[i, j]] + g_raw[[j, i]]);
        }
    }
    let g_eig = sym_eigen(&g)?;

    // d/2 most positive-class-dominant + d/2 most negative-class-dominant.
    let half = csp_dim / 2;
    let selected: Vec<usize> = (0..half).chain((c - half)..c).collect();
    let mut filters = Array2::<f64>::zeros((csp_dim, c));
    let mut eigenvalues = Vec::with_capacity(csp_dim);
    for (row, &idx) in selected.iter().enumerate() {
        eigenvalues.push(g_eig.values[idx]);
        // w_j = v_j' P  (generalized eigenvector in sensor space)
        for k in 0..c {
            let mut acc = 0.0;
            for i in 0..c {
                acc += g_eig.vectors[[i, idx]] * p[[i, k]];
            }
            filters[[row, k]] = acc;
        }
    }
    CspModel::new(filters, eigenvalues)
}

/// Fits CSP from two per-class trial lists (positive class first).
pub fn fit_csp(
    trials_pos: &[TrialMatrix],
    trials_neg: &[TrialMatrix],
    csp_dim: usize,
) -> Result<CspModel> {
    if trials_pos.is_empty() || trials_neg.is_empty() {
        return Err(Error::SingleClassTrainingSet);
    }
    let scatters_pos: Vec<Array2<f64>> =
        trials_pos.iter().map(|t| trial_scatter(t.samples())).collect();
    let scatters_neg: Vec<Array2<f64>> =
        trials_neg.iter().map(|t| trial_scatter(t.samples())).collect();
    let mean_pos = mean_normalized_covariance(scatters_pos.iter())?;
    let mean_neg = mean_normalized_covariance(scatters_neg.iter())?;
    fit_csp_from_covariances(&mean_pos, &mean_neg, csp_dim)
}

/// Fits CSP from precomputed per-trial scatter matrices grouped by class.
pub fn fit_csp_from_scatters(
    scatters_pos: &[&Array2<f64>],
    scatters_neg: &[&Array2<f64>],
    csp_dim: usize,
) -> Result<CspModel> {
    if scatters_pos.is_empty() || scatters_neg.is_empty() {
        return Err(Error::SingleClassTrainingSet);
    }
    let mean_pos = mean_normalized_covariance(scatters_pos.iter().copied())?;
    let mean_neg = mean_normalized_covariance(scatters_neg.iter().copied())?;
    fit_csp_from_covariances(&mean_pos, &mean_neg, csp_dim)
}

/// Log-variance-ratio features from a precomputed trial scatter:
/// `f_j = ln(w_j' S w_j / sum_k w_k' S w_k)`.
pub fn features_from_scatter(model: &CspModel, scatter: &Array2<f64>) -> Result<Vec<f64>> {
    if scatter.nrows() != model.n_channels || scatter.ncols() != model.n_channels {
        return Err(Error::DimensionMismatch {
            context: format!(
                "scatter is {} x {}, model expects {} channels",
                scatter.nrows(),
                scatter.ncols(),
                model.n_channels
            ),
        });
    }
    let d = model.csp_dim;
    let mut vars = Vec::with_capacity(d);
    for j in 0..d {
        let w: Vec<f64> = (0..model.n_channels).map(|k| model.filters[[j, k]]).collect();
        vars.push(quad_form(&w, scatter));
    }
    let total: f64 = vars.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateTrial {
            context: format!("zero total variance along CSP filters (total = {total})"),
        });
    }
    let features: Vec<f64> = vars.iter().map(|v| (v / total).ln()).collect();
    if !features.iter().all(|f| f.is_finite()) {
        return Err(Error::DegenerateTrial {
            context: "zero variance along a CSP filter".into(),
        });
    }
    Ok(features)
}

/// Log-variance-ratio features of one trial.
pub fn extract_features(model: &CspModel, trial: &TrialMatrix) -> Result<Vec<f64>> {
    if trial.n_channels() != model.n_channels {
        return Err(Error::DimensionMismatch {
            context: format!(
                "trial has {} channels, model expects {}",
                trial.n_channels(),
                model.n_channels
            ),
        });
    }
    features_from_scatter(model, &trial_scatter(trial.samples()))
}

/// Diagnostic band-power features: for each band (outer) and channel (inner),
/// the natural log of the mean squared amplitude after band-pass filtering.
pub fn extract_bandpower_baseline(
    trial: &TrialMatrix,
    bands: &[Band],
    sample_rate_hz: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(bands.len() * trial.n_channels());
    for &band in bands {
        let filtered = bandpass(trial, band, sample_rate_hz)?;
        let x = filtered.samples();
        let n = x.nrows() as f64;
        for c in 0..x.ncols() {
            let p: f64 = (0..x.nrows()).map(|t| x[[t, c]] * x[[t, c]]).sum::<f64>() / n;
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::DegenerateTrial {
                    context: format!("zero band power in {band} on channel {c}"),
                });
            }
            out.push(p.ln());
        }
    }
    Ok(out)
}
