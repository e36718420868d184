//! Stochastic gradient boosting over precondition universes, with the
//! misclassification-driven resample pool.
//!
//! Squared loss `L = (y - F)^2 / 2` throughout, so pseudo-residuals are
//! `r = y - F` and the line search has the closed form `alpha = mean(r * h)`
//! for hard +/-1 learner outputs.
//!
//! Base learners are trained once per precondition on the full training
//! split and memoized; the per-iteration resample subset only biases which
//! candidate is *selected* (residual sum of squares is evaluated on the
//! drawn subset, with multiplicity). The duplication factor and the applied
//! step size are always computed on the original training split.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use ndarray::Array2;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csp::{features_from_scatter, fit_csp_from_scatters};
use crate::dsp::{bandpass, detrend, scatter_submatrix, trial_scatter};
use crate::error::{Error, Result};
use crate::model::{AdditiveModel, BaseLearner, BoostTerm, MODEL_FORMAT_VERSION};
use crate::seed::{self, Domain};
use crate::svm::train_linear;
use crate::types::{BoostConfig, Precondition, SessionDataset};

pub const TRACE_FORMAT_VERSION: u32 = 1;

/// Minimizer of the squared loss over a constant score: the label mean.
pub fn init_intercept(labels: &[i8]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(labels.iter().map(|&l| f64::from(l)).sum::<f64>() / labels.len() as f64)
}

/// `r_i = y_i - F(x_i)`, the negative gradient of the squared loss.
pub fn pseudo_residuals(labels: &[i8], scores: &[f64]) -> Result<Vec<f64>> {
    if labels.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            context: format!("{} labels vs {} scores", labels.len(), scores.len()),
        });
    }
    Ok(labels.iter().zip(scores).map(|(&y, &f)| f64::from(y) - f).collect())
}

/// `d = max(1, floor((1 - e) / (e + epsilon)))`: how many extra pool copies
/// each misclassified sample earns.
pub fn compute_duplication(train_error: f64, epsilon: f64) -> usize {
    debug_assert!((0.0..1.0).contains(&train_error) && epsilon > 0.0);
    let d = ((1.0 - train_error) / (train_error + epsilon)).floor();
    (d as usize).max(1)
}

/// The multiset of training-trial indices the per-iteration subsets are
/// drawn from. Misclassified indices accumulate multiplicity; a seeded
/// downsample enforces the cap while keeping every index's multiplicity
/// at >= 1.
#[derive(Debug, Clone)]
pub struct ResamplePool {
    /// Multiplicity per trial index (zero for indices outside the pool).
    counts: Vec<usize>,
    /// The original training indices, ascending; defines the origin size N.
    origin: Vec<usize>,
    cap: usize,
}

impl ResamplePool {
    /// One copy of every training index (`P_0 = T`).
    pub fn new(train_indices: &[usize], n_trials: usize, cap_multiple: usize) -> Result<Self> {
        if train_indices.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut origin = train_indices.to_vec();
        origin.sort_unstable();
        origin.dedup();
        if origin.len() != train_indices.len() {
            return Err(Error::InvalidConfig("duplicate training indices in pool".into()));
        }
        if *origin.last().unwrap() >= n_trials {
            return Err(Error::InvalidConfig("training index out of range".into()));
        }
        let mut counts = vec![0usize; n_trials];
        for &i in &origin {
            counts[i] = 1;
        }
        let cap = cap_multiple
            .checked_mul(origin.len())
            .ok_or_else(|| Error::InvalidConfig("pool cap overflow".into()))?;
        Ok(Self { counts, origin, cap })
    }

    pub fn len(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn origin_size(&self) -> usize {
        self.origin.len()
    }

    pub fn multiplicity(&self, index: usize) -> usize {
        self.counts.get(index).copied().unwrap_or(0)
    }

    /// All entries with multiplicity, ascending by index.
    fn entries(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        for &i in &self.origin {
            out.extend(std::iter::repeat(i).take(self.counts[i]));
        }
        out
    }

    /// Uniform permutation of the pool entries, first `n_hat` taken.
    /// Duplicates are possible: the pool is a multiset.
    pub fn draw_subset(&self, n_hat: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
        let size = self.len();
        if n_hat > size {
            return Err(Error::InvalidConfig(format!(
                "subset size {n_hat} exceeds pool size {size}"
            )));
        }
        let mut entries = self.entries();
        seed::shuffle(&mut entries, rng);
        entries.truncate(n_hat);
        Ok(entries)
    }

    /// For each misclassified index holding M copies, grow it to (d+1)*M
    /// copies; then, if over the cap, reserve one copy of every origin index
    /// and downsample the remainder uniformly (seeded) back to the cap.
    pub fn update(&mut self, misclassified: &[usize], d: usize, rng: &mut ChaCha8Rng) {
        for &i in misclassified {
            if self.counts.get(i).copied().unwrap_or(0) > 0 {
                self.counts[i] *= d + 1;
            }
        }
        let size = self.len();
        if size <= self.cap {
            return;
        }
        // Keep one guaranteed copy per origin index, sample the rest.
        let n = self.origin.len();
        let mut spare = Vec::with_capacity(size - n);
        for &i in &self.origin {
            spare.extend(std::iter::repeat(i).take(self.counts[i] - 1));
        }
        let keep = seed::sample_indices(spare.len(), self.cap - n, rng);
        for &i in &self.origin {
            self.counts[i] = 1;
        }
        for k in keep {
            self.counts[spare[k]] += 1;
        }
        debug_assert_eq!(self.len(), self.cap);
    }
}

/// Residual fit of a candidate's hard outputs on a drawn subset:
/// `rho = mean(r * f)` and `sse = sum (r - rho * f)^2`, both over the subset
/// entries (with multiplicity).
pub fn score_candidate(
    outputs: &[i8],
    subset: &[usize],
    residuals: &[f64],
) -> Result<(f64, f64)> {
    if subset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut cross = 0.0;
    for &i in subset {
        cross += residuals[i] * f64::from(outputs[i]);
    }
    // f_i in {-1,+1} so sum f^2 = |subset|.
    let rho = cross / subset.len() as f64;
    let mut sse = 0.0;
    for &i in subset {
        let d = residuals[i] - rho * f64::from(outputs[i]);
        sse += d * d;
    }
    Ok((rho, sse))
}

/// Closed-form step size over the full training split: `mean(r * f)`.
pub fn line_search_alpha(residuals: &[f64], outputs: &[i8], train_indices: &[usize]) -> f64 {
    let mut cross = 0.0;
    for &i in train_indices {
        cross += residuals[i] * f64::from(outputs[i]);
    }
    cross / train_indices.len() as f64
}

/// A memoized candidate: its learner and hard outputs on every trial.
pub struct TrainedCandidate {
    pub learner: BaseLearner,
    /// One +/-1 output per trial of the session (training and validation).
    pub outputs: Vec<i8>,
}

/// Per-session preprocessing shared by every candidate: detrended trials
/// reduced to one full-channel scatter matrix per (band, trial). Candidate
/// training then only extracts submatrices, which is exactly equivalent to
/// projecting channels before filtering.
pub struct SessionContext {
    labels: Vec<i8>,
    n_channels: usize,
    /// band edges -> per-trial full-channel scatter.
    scatters: BTreeMap<(u32, u32), Vec<Array2<f64>>>,
}

impl SessionContext {
    pub fn new(dataset: &SessionDataset, universe: &[Precondition]) -> Result<Self> {
        if dataset.trials.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let detrended: Vec<_> = dataset
            .trials
            .par_iter()
            .map(detrend)
            .collect::<Result<Vec<_>>>()?;
        let mut bands: Vec<_> = universe.iter().map(|p| p.band).collect();
        bands.sort_by_key(|b| (b.low_hz(), b.high_hz()));
        bands.dedup();
        let per_band: Vec<((u32, u32), Vec<Array2<f64>>)> = bands
            .par_iter()
            .map(|&band| {
                let scatters = detrended
                    .par_iter()
                    .map(|t| {
                        bandpass(t, band, dataset.sample_rate_hz)
                            .map(|f| trial_scatter(f.samples()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(((band.low_hz(), band.high_hz()), scatters))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            labels: dataset.labels(),
            n_channels: dataset.n_channels(),
            scatters: per_band.into_iter().collect(),
        })
    }

    pub fn n_trials(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    fn band_scatters(&self, p: &Precondition) -> Result<&Vec<Array2<f64>>> {
        self.scatters
            .get(&(p.band.low_hz(), p.band.high_hz()))
            .ok_or_else(|| Error::InvalidConfig(format!("band {} not preprocessed", p.band)))
    }

    /// Trains the CSP + linear SVM learner for one precondition on the
    /// training split and records its outputs on every trial.
    pub fn train_candidate(
        &self,
        precondition: &Precondition,
        train_indices: &[usize],
        csp_dim: usize,
        svm_cost: f64,
        svm_seed: u64,
    ) -> Result<TrainedCandidate> {
        if precondition.channels.n_channels() != self.n_channels {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "precondition over {} channels, session has {}",
                    precondition.channels.n_channels(),
                    self.n_channels
                ),
            });
        }
        let full = self.band_scatters(precondition)?;
        let sub: Vec<Array2<f64>> = full
            .iter()
            .map(|s| scatter_submatrix(s, &precondition.channels))
            .collect();
        let pos: Vec<&Array2<f64>> = train_indices
            .iter()
            .filter(|&&i| self.labels[i] == 1)
            .map(|&i| &sub[i])
            .collect();
        let neg: Vec<&Array2<f64>> = train_indices
            .iter()
            .filter(|&&i| self.labels[i] == -1)
            .map(|&i| &sub[i])
            .collect();
        let csp = fit_csp_from_scatters(&pos, &neg, csp_dim)?;
        let features: Vec<Vec<f64>> = sub
            .iter()
            .map(|s| features_from_scatter(&csp, s))
            .collect::<Result<Vec<_>>>()?;
        let train_features: Vec<Vec<f64>> =
            train_indices.iter().map(|&i| features[i].clone()).collect();
        let train_labels: Vec<i8> = train_indices.iter().map(|&i| self.labels[i]).collect();
        let linear = train_linear(&train_features, &train_labels, svm_cost, svm_seed)?;
        let outputs = features
            .iter()
            .map(|f| crate::svm::predict_label(&linear, f))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrainedCandidate { learner: BaseLearner::new(csp, linear)?, outputs })
    }
}

/// One boosting iteration as recorded in the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration number.
    pub k: usize,
    /// Index of the chosen precondition within the universe.
    pub universe_index: usize,
    pub precondition: Precondition,
    /// Residual-fit coefficient on the drawn subset (selection statistic).
    pub rho: f64,
    /// Applied step size, computed on the full training split.
    pub alpha: f64,
    /// Ensemble misclassification rate on the training split after this step.
    pub train_error: f64,
    /// Squared loss sum over the training split after this step.
    pub train_loss: f64,
    pub duplication: usize,
    pub pool_size: usize,
    pub validation_error: Option<f64>,
    /// The drawn resample subset (trial indices, duplicates possible).
    pub subset: Vec<usize>,
}

/// Full training transcript of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostTrace {
    pub format_version: u32,
    pub mode: crate::types::PreconditionMode,
    pub n_trials: usize,
    pub train_indices: Vec<usize>,
    pub validation_indices: Vec<usize>,
    pub intercept: f64,
    /// Loss and errors of the intercept-only model (iteration 0).
    pub initial_train_loss: f64,
    pub initial_train_error: f64,
    pub initial_validation_error: Option<f64>,
    pub records: Vec<IterationRecord>,
    pub selected_k: usize,
}

fn misclassified(labels: &[i8], scores: &[f64], indices: &[usize]) -> Vec<usize> {
    indices
        .iter()
        .copied()
        .filter(|&i| {
            let pred: i8 = if scores[i] >= 0.0 { 1 } else { -1 };
            pred != labels[i]
        })
        .collect()
}

fn squared_loss(labels: &[i8], scores: &[f64], indices: &[usize]) -> f64 {
    indices
        .iter()
        .map(|&i| {
            let r = f64::from(labels[i]) - scores[i];
            0.5 * r * r
        })
        .sum()
}

/// Stratified holdout: per class, a seeded shuffle and a
/// `floor(fraction * class size)` cut. Returns (train, validation), both
/// ascending.
fn validation_split(
    labels: &[i8],
    fraction: f64,
    master_seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = seed::rng(master_seed, Domain::ValidationSplit, &[]);
    let mut validation = Vec::new();
    for class in [1i8, -1] {
        let mut ids: Vec<usize> =
            (0..labels.len()).filter(|&i| labels[i] == class).collect();
        seed::shuffle(&mut ids, &mut rng);
        let n_val = (fraction * ids.len() as f64).floor() as usize;
        validation.extend_from_slice(&ids[..n_val]);
    }
    validation.sort_unstable();
    let train: Vec<usize> =
        (0..labels.len()).filter(|i| validation.binary_search(i).is_err()).collect();
    (train, validation)
}

fn check_universe(universe: &[Precondition], n_channels: usize) -> Result<()> {
    if universe.is_empty() {
        return Err(Error::InvalidConfig("empty precondition universe".into()));
    }
    for w in universe.windows(2) {
        if w[0].canonical_cmp(&w[1]) != std::cmp::Ordering::Less {
            return Err(Error::InvalidConfig(
                "universe must be deduplicated and in canonical order".into(),
            ));
        }
    }
    if universe.iter().any(|p| p.channels.n_channels() != n_channels) {
        return Err(Error::DimensionMismatch {
            context: "universe channel count differs from dataset".into(),
        });
    }
    if universe.windows(2).any(|w| w[0].mode != w[1].mode) {
        return Err(Error::InvalidConfig("universe mixes precondition modes".into()));
    }
    Ok(())
}

/// Trains one session: stratified validation split, memoized candidate
/// training, `k_max` boosting iterations, early stopping by validation error
/// (earliest minimum, intercept-only included). Deterministic given
/// `config.rng_seed`, independent of worker-thread count.
pub fn train_session(
    dataset: &SessionDataset,
    universe: &[Precondition],
    config: &BoostConfig,
) -> Result<(AdditiveModel, BoostTrace)> {
    config.validate()?;
    if dataset.trials.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_universe(universe, dataset.n_channels())?;
    let labels = dataset.labels();
    if !labels.iter().any(|&l| l == 1) || !labels.iter().any(|&l| l == -1) {
        return Err(Error::SingleClassTrainingSet);
    }
    let master = config.rng_seed;
    let (train_idx, val_idx) = validation_split(&labels, config.validation_fraction, master);
    if !train_idx.iter().any(|&i| labels[i] == 1) || !train_idx.iter().any(|&i| labels[i] == -1)
    {
        return Err(Error::SingleClassTrainingSet);
    }
    let mode = universe[0].mode;

    let ctx = SessionContext::new(dataset, universe)?;
    let cache: Vec<OnceLock<Arc<std::result::Result<TrainedCandidate, Error>>>> =
        (0..universe.len()).map(|_| OnceLock::new()).collect();
    let candidate = |ci: usize| -> &Arc<std::result::Result<TrainedCandidate, Error>> {
        cache[ci].get_or_init(|| {
            Arc::new(ctx.train_candidate(
                &universe[ci],
                &train_idx,
                config.csp_dim,
                config.svm_cost,
                seed::derive(master, Domain::SvmShuffle, &[ci as u64]),
            ))
        })
    };

    let intercept = init_intercept(&train_idx.iter().map(|&i| labels[i]).collect::<Vec<_>>())?;
    let mut scores = vec![intercept; labels.len()];
    let val_error = |scores: &[f64]| -> Option<f64> {
        if val_idx.is_empty() {
            None
        } else {
            Some(misclassified(&labels, scores, &val_idx).len() as f64 / val_idx.len() as f64)
        }
    };

    let initial_train_loss = squared_loss(&labels, &scores, &train_idx);
    let initial_train_error =
        misclassified(&labels, &scores, &train_idx).len() as f64 / train_idx.len() as f64;
    let initial_validation_error = val_error(&scores);

    let mut pool = ResamplePool::new(&train_idx, labels.len(), config.pool_cap_multiple)?;
    let n_hat = ((config.subset_fraction * train_idx.len() as f64).round() as usize)
        .clamp(1, train_idx.len());

    let mut records: Vec<IterationRecord> = Vec::with_capacity(config.k_max);
    let mut terms: Vec<BoostTerm> = Vec::with_capacity(config.k_max);

    for k in 1..=config.k_max {
        let mut draw_rng = seed::rng(master, Domain::SubsetDraw, &[k as u64]);
        let subset = pool.draw_subset(n_hat, &mut draw_rng)?;

        let candidate_ids: Vec<usize> = if universe.len() <= config.candidate_sample_size {
            (0..universe.len()).collect()
        } else {
            let mut rng = seed::rng(master, Domain::CandidateSample, &[k as u64]);
            let mut ids =
                seed::sample_indices(universe.len(), config.candidate_sample_size, &mut rng);
            ids.sort_unstable();
            ids
        };

        // Train any not-yet-memoized candidates in parallel; each cell's
        // value depends only on its own index, so thread order is irrelevant.
        candidate_ids.par_iter().for_each(|&ci| {
            let _ = candidate(ci);
        });

        let residuals = pseudo_residuals(&labels, &scores)?;
        let mut best: Option<(usize, f64, f64)> = None; // (index, rho, sse)
        for &ci in &candidate_ids {
            let trained = candidate(ci);
            let outputs = match trained.as_ref() {
                Ok(t) => &t.outputs,
                Err(_) => continue,
            };
            let (rho, sse) = score_candidate(outputs, &subset, &residuals)?;
            // Strict < keeps the earliest (canonical-order) candidate on ties.
            if best.map_or(true, |(_, _, b)| sse < b) {
                best = Some((ci, rho, sse));
            }
        }
        let (chosen, rho, _) = best.ok_or(Error::NoViableCandidate {
            n_candidates: candidate_ids.len(),
        })?;
        let trained = candidate(chosen).clone();
        let trained = match trained.as_ref() {
            Ok(t) => t,
            Err(_) => unreachable!("selected candidate trained successfully"),
        };

        let alpha = line_search_alpha(&residuals, &trained.outputs, &train_idx);
        for (i, s) in scores.iter_mut().enumerate() {
            *s += alpha * f64::from(trained.outputs[i]);
        }

        let wrong = misclassified(&labels, &scores, &train_idx);
        let train_error = wrong.len() as f64 / train_idx.len() as f64;
        let train_loss = squared_loss(&labels, &scores, &train_idx);
        let duplication = if train_error < 1.0 {
            compute_duplication(train_error, config.epsilon)
        } else {
            1
        };
        let mut pool_rng = seed::rng(master, Domain::PoolDownsample, &[k as u64]);
        pool.update(&wrong, duplication, &mut pool_rng);

        records.push(IterationRecord {
            k,
            universe_index: chosen,
            precondition: universe[chosen],
            rho,
            alpha,
            train_error,
            train_loss,
            duplication,
            pool_size: pool.len(),
            validation_error: val_error(&scores),
            subset,
        });
        terms.push(BoostTerm {
            alpha,
            precondition: universe[chosen],
            learner: trained.learner.clone(),
        });
    }

    // Early stopping: earliest k (0 = intercept-only) minimizing validation
    // error; without a validation split, keep every term.
    let selected_k = if val_idx.is_empty() {
        terms.len()
    } else {
        let mut best_k = 0;
        let mut best_err = initial_validation_error.unwrap();
        for rec in &records {
            let err = rec.validation_error.unwrap();
            if err < best_err {
                best_err = err;
                best_k = rec.k;
            }
        }
        best_k
    };

    let model = AdditiveModel {
        format_version: MODEL_FORMAT_VERSION,
        mode,
        intercept,
        n_channels: dataset.n_channels(),
        sample_rate_hz: dataset.sample_rate_hz,
        channel_names: dataset.channel_names.clone(),
        terms,
        selected_k,
        config: config.clone(),
    };
    model.validate()?;
    let trace = BoostTrace {
        format_version: TRACE_FORMAT_VERSION,
        mode,
        n_trials: labels.len(),
        train_indices: train_idx,
        validation_indices: val_idx,
        intercept,
        initial_train_loss,
        initial_train_error,
        initial_validation_error,
        records,
        selected_k,
    };
    Ok((model, trace))
}

/// Accuracy and confusion counts of a model on a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_trials: usize,
    pub n_correct: usize,
    pub accuracy: f64,
    /// true label +1 predicted +1
    pub true_positive: usize,
    /// true label -1 predicted -1
    pub true_negative: usize,
    /// true label -1 predicted +1
    pub false_positive: usize,
    /// true label +1 predicted -1
    pub false_negative: usize,
}

pub fn evaluate(model: &AdditiveModel, dataset: &SessionDataset) -> Result<EvalReport> {
    let predictions = model.predict(dataset)?;
    let labels = dataset.labels();
    let (mut tp, mut tn, mut fp, mut fne) = (0, 0, 0, 0);
    for (&p, &y) in predictions.iter().zip(&labels) {
        match (y, p) {
            (1, 1) => tp += 1,
            (-1, -1) => tn += 1,
            (-1, 1) => fp += 1,
            (1, -1) => fne += 1,
            _ => unreachable!("labels validated to +/-1"),
        }
    }
    let n_correct = tp + tn;
    Ok(EvalReport {
        n_trials: labels.len(),
        n_correct,
        accuracy: n_correct as f64 / labels.len() as f64,
        true_positive: tp,
        true_negative: tn,
        false_positive: fp,
        false_negative: fne,
    })
}
