//! Trained model containers: a CSP + linear-SVM base learner, the additive
//! boosted ensemble, and the ensemble's prediction pipeline.
//!
//! Prediction mirrors training exactly: detrend, band-pass per distinct band
//! (the per-band brickwall subsumes the global [5, 40] pass, since its bin
//! mask is a subset of the global mask), one full-channel scatter per band,
//! then per-term channel projection via submatrix extraction.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::csp::{features_from_scatter, CspModel};
use crate::dsp::{bandpass, detrend, scatter_submatrix, trial_scatter};
use crate::error::{Error, Result};
use crate::svm::{predict_label, LinearModel};
use crate::types::{
    BoostConfig, Precondition, PreconditionMode, SessionDataset, TrialMatrix,
};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// One weak classifier: a CSP transform feeding a linear SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseLearner {
    pub csp: CspModel,
    pub linear: LinearModel,
}

impl BaseLearner {
    pub fn new(csp: CspModel, linear: LinearModel) -> Result<Self> {
        if linear.weights.len() != csp.csp_dim() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} SVM weights for csp_dim {}",
                    linear.weights.len(),
                    csp.csp_dim()
                ),
            });
        }
        Ok(Self { csp, linear })
    }

    /// Hard +/-1 output from a scatter matrix over this learner's channels.
    pub fn output_from_scatter(&self, scatter: &Array2<f64>) -> Result<i8> {
        let features = features_from_scatter(&self.csp, scatter)?;
        predict_label(&self.linear, &features)
    }
}

/// One boosting term: `alpha * h(x | precondition)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostTerm {
    pub alpha: f64,
    pub precondition: Precondition,
    pub learner: BaseLearner,
}

/// A trained additive ensemble.
///
/// `terms` holds every boosting iteration in order; `selected_k` is the
/// validation-chosen prefix length actually used for prediction (0 means an
/// intercept-only model).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveModel {
    pub format_version: u32,
    pub mode: PreconditionMode,
    pub intercept: f64,
    pub n_channels: usize,
    pub sample_rate_hz: f64,
    pub channel_names: Vec<String>,
    pub terms: Vec<BoostTerm>,
    pub selected_k: usize,
    pub config: BoostConfig,
}

impl AdditiveModel {
    /// The prefix of terms used for prediction.
    pub fn selected_terms(&self) -> &[BoostTerm] {
        &self.terms[..self.selected_k]
    }

    /// Structural consistency check; run after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported model format_version {}",
                self.format_version
            )));
        }
        if self.selected_k > self.terms.len() {
            return Err(Error::InvalidConfig(format!(
                "selected_k {} exceeds {} terms",
                self.selected_k,
                self.terms.len()
            )));
        }
        if !self.intercept.is_finite() {
            return Err(Error::NonFiniteSamples { context: "model intercept".into() });
        }
        if self.n_channels == 0 || self.sample_rate_hz <= 0.0 {
            return Err(Error::InvalidConfig(
                "model requires n_channels >= 1 and a positive sample rate".into(),
            ));
        }
        if !self.channel_names.is_empty() && self.channel_names.len() != self.n_channels {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} channel names for {} channels",
                    self.channel_names.len(),
                    self.n_channels
                ),
            });
        }
        for (k, term) in self.terms.iter().enumerate() {
            if !term.alpha.is_finite() {
                return Err(Error::NonFiniteSamples { context: format!("alpha of term {k}") });
            }
            if term.precondition.channels.n_channels() != self.n_channels {
                return Err(Error::DimensionMismatch {
                    context: format!(
                        "term {k} precondition is over {} channels, model has {}",
                        term.precondition.channels.n_channels(),
                        self.n_channels
                    ),
                });
            }
            if term.learner.csp.n_channels() != term.precondition.channels.popcount() {
                return Err(Error::DimensionMismatch {
                    context: format!(
                        "term {k} CSP expects {} channels, precondition selects {}",
                        term.learner.csp.n_channels(),
                        term.precondition.channels.popcount()
                    ),
                });
            }
            if term.learner.linear.weights.len() != term.learner.csp.csp_dim() {
                return Err(Error::DimensionMismatch {
                    context: format!("term {k} SVM/CSP dimension disagreement"),
                });
            }
        }
        Ok(())
    }

    fn check_trial(&self, trial: &TrialMatrix) -> Result<()> {
        if trial.n_channels() != self.n_channels {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "trial has {} channels, model expects {}",
                    trial.n_channels(),
                    self.n_channels
                ),
            });
        }
        Ok(())
    }

    /// Raw additive score `F(x) = intercept + sum alpha_k h_k(x)` over the
    /// selected prefix.
    pub fn decision_function(&self, trial: &TrialMatrix) -> Result<f64> {
        self.check_trial(trial)?;
        let detrended = detrend(trial)?;
        // One band-pass + full-channel scatter per distinct band; per-term
        // channel selection is an exact submatrix of that scatter.
        let mut scatters: BTreeMap<(u32, u32), Array2<f64>> = BTreeMap::new();
        for term in self.selected_terms() {
            let key = (term.precondition.band.low_hz(), term.precondition.band.high_hz());
            if !scatters.contains_key(&key) {
                let filtered = bandpass(&detrended, term.precondition.band, self.sample_rate_hz)?;
                scatters.insert(key, trial_scatter(filtered.samples()));
            }
        }
        let mut score = self.intercept;
        for term in self.selected_terms() {
            let key = (term.precondition.band.low_hz(), term.precondition.band.high_hz());
            let sub = scatter_submatrix(&scatters[&key], &term.precondition.channels);
            let output = term.learner.output_from_scatter(&sub)?;
            score += term.alpha * f64::from(output);
        }
        Ok(score)
    }

    /// Hard +/-1 prediction; a zero score maps to +1.
    pub fn predict_trial(&self, trial: &TrialMatrix) -> Result<i8> {
        Ok(if self.decision_function(trial)? >= 0.0 { 1 } else { -1 })
    }

    fn check_dataset(&self, dataset: &SessionDataset) -> Result<()> {
        if dataset.trials.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let fs = dataset.sample_rate_hz;
        if !(fs.is_finite() && (fs - self.sample_rate_hz).abs() <= 1e-9 * self.sample_rate_hz) {
            return Err(Error::InvalidDataset(format!(
                "sample rate {} Hz does not match model's {} Hz",
                fs, self.sample_rate_hz
            )));
        }
        Ok(())
    }

    /// Decision scores for every trial of a dataset.
    pub fn decision_values(&self, dataset: &SessionDataset) -> Result<Vec<f64>> {
        self.check_dataset(dataset)?;
        dataset.trials.iter().map(|t| self.decision_function(t)).collect()
    }

    /// Hard predictions for every trial of a dataset.
    pub fn predict(&self, dataset: &SessionDataset) -> Result<Vec<i8>> {
        Ok(self
            .decision_values(dataset)?
            .into_iter()
            .map(|v| if v >= 0.0 { 1 } else { -1 })
            .collect())
    }
}
