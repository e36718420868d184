//! Importance aggregation over trained ensembles and the temporal statistics
//! used to track how channel/band responsibility drifts across sessions.
//!
//! Importance is the signed sum of ensemble weights: channel c accumulates
//! `alpha_k` for every selected term whose subset contains c, and each unit
//! frequency bin accumulates `alpha_k` of every term whose band covers it.
//! An absolute-value variant (`use_abs`) is available for robustness studies
//! since squared-loss boosting can produce negative weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::AdditiveModel;
use crate::types::GLOBAL_LOW_HZ;

/// Unit bins [5,6) .. [39,40) spanning the global band.
pub const N_BAND_BINS: usize = 35;

/// Per-channel importance `L = sum alpha_k * mask(S_k)` over the selected
/// prefix. Intercept-only models give the zero vector.
pub fn channel_importance(model: &AdditiveModel, use_abs: bool) -> Vec<f64> {
    let mut importance = vec![0.0; model.n_channels];
    for term in model.selected_terms() {
        let w = if use_abs { term.alpha.abs() } else { term.alpha };
        for c in term.precondition.channels.indices() {
            importance[c] += w;
        }
    }
    importance
}

/// Per-unit-bin band importance over the selected prefix; bin `i` covers
/// `[5 + i, 6 + i)` Hz.
pub fn band_importance(model: &AdditiveModel, use_abs: bool) -> Vec<f64> {
    let mut importance = vec![0.0; N_BAND_BINS];
    for term in model.selected_terms() {
        let w = if use_abs { term.alpha.abs() } else { term.alpha };
        for (i, slot) in importance.iter_mut().enumerate() {
            if term.precondition.band.contains_bin(GLOBAL_LOW_HZ + i as u32) {
                *slot += w;
            }
        }
    }
    importance
}

/// Population variance of the importance vector after normalizing it to sum
/// one. Scale-invariant; errors on an empty or non-positive-sum vector.
pub fn normalized_variance(importance: &[f64]) -> Result<f64> {
    let sum: f64 = importance.iter().sum();
    if importance.is_empty() || sum <= 0.0 {
        return Err(Error::EmptyProfile {
            context: "normalized_variance requires a positive importance sum".into(),
        });
    }
    let n = importance.len() as f64;
    let normalized: Vec<f64> = importance.iter().map(|&v| v / sum).collect();
    let mean = 1.0 / n;
    Ok(normalized.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n)
}

/// Importance-weighted mean frequency, with bin `[l, l+1)` contributing its
/// center `l + 0.5`.
pub fn band_center_of_mass(band_importance: &[f64]) -> Result<f64> {
    if band_importance.len() != N_BAND_BINS {
        return Err(Error::DimensionMismatch {
            context: format!(
                "band importance has {} bins, expected {N_BAND_BINS}",
                band_importance.len()
            ),
        });
    }
    let total: f64 = band_importance.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyProfile {
            context: "band center of mass requires positive total importance".into(),
        });
    }
    let weighted: f64 = band_importance
        .iter()
        .enumerate()
        .map(|(i, &w)| (f64::from(GLOBAL_LOW_HZ) + i as f64 + 0.5) * w)
        .sum();
    Ok(weighted / total)
}

/// One session's aggregated importance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceProfile {
    pub session_index: usize,
    pub channel_importance: Vec<f64>,
    /// 35 unit bins over [5, 40) Hz.
    pub band_importance: Vec<f64>,
    /// Variance of the normalized channel importance; `None` when the signed
    /// importance does not normalize (zero or non-positive sum).
    pub channel_variance: Option<f64>,
    /// Band importance center of mass in Hz; `None` when degenerate.
    pub band_com_hz: Option<f64>,
}

impl ImportanceProfile {
    pub fn from_model(model: &AdditiveModel, session_index: usize, use_abs: bool) -> Self {
        let channel = channel_importance(model, use_abs);
        let band = band_importance(model, use_abs);
        let channel_variance = normalized_variance(&channel).ok();
        let band_com_hz = band_center_of_mass(&band).ok();
        Self {
            session_index,
            channel_importance: channel,
            band_importance: band,
            channel_variance,
            band_com_hz,
        }
    }
}

/// What a temporal series tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum Target {
    Channel(usize),
    /// Unit frequency bin offset: bin `i` covers `[5 + i, 6 + i)` Hz.
    BandBin(usize),
}

/// Mean-centered importance of one target across sessions, with its drift
/// statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalSeries {
    pub target: Target,
    /// `x_t - mean_t(x)` in session order.
    pub differences: Vec<f64>,
    /// Spearman rank correlation of the raw series against session order;
    /// 0 with `constant = true` when the series does not vary.
    pub spearman: f64,
    pub constant: bool,
}

/// Average-tie ranks (1-based) of a series.
fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j share the same value: average rank.
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman correlation of `values` against their index order (0, 1, ...).
/// Returns `(0.0, true)` for a constant series.
pub fn spearman_vs_order(values: &[f64]) -> (f64, bool) {
    let n = values.len();
    if n < 2 || values.iter().all(|&v| v == values[0]) {
        return (0.0, true);
    }
    let rx = ranks(values);
    let ry: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let mean = (n as f64 + 1.0) / 2.0;
    let mut num = 0.0;
    let mut den_x = 0.0;
    let mut den_y = 0.0;
    for i in 0..n {
        let dx = rx[i] - mean;
        let dy = ry[i] - mean;
        num += dx * dy;
        den_x += dx * dx;
        den_y += dy * dy;
    }
    ((num / (den_x * den_y).sqrt()), false)
}

/// For each target, the mean-centered cross-session series and its Spearman
/// drift statistic. Profiles must be given in session order and agree on
/// vector lengths.
pub fn temporal_differences(
    profiles: &[ImportanceProfile],
    targets: &[Target],
) -> Result<Vec<TemporalSeries>> {
    if profiles.len() < 2 {
        return Err(Error::InvalidConfig(
            "temporal differences need at least 2 profiles".into(),
        ));
    }
    let n_channels = profiles[0].channel_importance.len();
    for p in profiles {
        if p.channel_importance.len() != n_channels
            || p.band_importance.len() != N_BAND_BINS
        {
            return Err(Error::DimensionMismatch {
                context: "importance profiles disagree on vector lengths".into(),
            });
        }
    }
    targets
        .iter()
        .map(|&target| {
            let series: Vec<f64> = profiles
                .iter()
                .map(|p| match target {
                    Target::Channel(c) => {
                        p.channel_importance.get(c).copied().ok_or_else(|| {
                            Error::DimensionMismatch {
                                context: format!("channel {c} out of range"),
                            }
                        })
                    }
                    Target::BandBin(b) => {
                        p.band_importance.get(b).copied().ok_or_else(|| {
                            Error::DimensionMismatch {
                                context: format!("band bin {b} out of range"),
                            }
                        })
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean = series.iter().sum::<f64>() / series.len() as f64;
            let differences = series.iter().map(|v| v - mean).collect();
            let (spearman, constant) = spearman_vs_order(&series);
            Ok(TemporalSeries { target, differences, spearman, constant })
        })
        .collect()
}
