//! Domain types: trials, sessions, channel sets, frequency bands,
//! preconditions, and boosting configuration.
//!
//! Construction validates invariants and returns [`Error`](crate::Error) on
//! violation; once built, values are immutable. Dataset-level structural
//! problems are reported (not thrown) by [`validate_dataset`] so callers can
//! present them all at once.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower edge of the global analysis band in Hz.
pub const GLOBAL_LOW_HZ: u32 = 5;
/// Upper edge of the global analysis band in Hz.
pub const GLOBAL_HIGH_HZ: u32 = 40;
/// Default minimum number of channels in a spatial precondition.
pub const DEFAULT_MIN_CHANNELS: usize = 4;
/// Hard cap on channel count for bitmask channel sets.
pub const MAX_CHANNELS: usize = 32;

/// One trial: a Time x Channel sample matrix plus its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMatrix {
    samples: Array2<f64>,
    label: i8,
}

impl TrialMatrix {
    /// Validates shape (>= 2 samples, >= 1 channel), finiteness, and the
    /// label being -1 or +1.
    pub fn new(samples: Array2<f64>, label: i8) -> Result<Self> {
        if samples.nrows() < 2 || samples.ncols() < 1 {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "trial must be at least 2 samples x 1 channel, got {} x {}",
                    samples.nrows(),
                    samples.ncols()
                ),
            });
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteSamples { context: "trial".into() });
        }
        if label != -1 && label != 1 {
            return Err(Error::InvalidLabel { value: label as i32 });
        }
        Ok(Self { samples, label })
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn label(&self) -> i8 {
        self.label
    }

    pub fn n_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_channels(&self) -> usize {
        self.samples.ncols()
    }

    /// Same samples, different label. Used by label-shuffle controls.
    pub fn with_label(&self, label: i8) -> Result<Self> {
        Self::new(self.samples.clone(), label)
    }
}

/// A recording session: an ordered list of trials plus acquisition metadata.
///
/// Construction is deliberately permissive about cross-trial consistency so
/// that [`validate_dataset`] can report every structural issue; training entry
/// points reject datasets whose report is non-empty.
#[derive(Debug, Clone)]
pub struct SessionDataset {
    pub trials: Vec<TrialMatrix>,
    pub sample_rate_hz: f64,
    pub channel_names: Vec<String>,
    pub session_index: usize,
}

impl SessionDataset {
    pub fn new(
        trials: Vec<TrialMatrix>,
        sample_rate_hz: f64,
        channel_names: Vec<String>,
        session_index: usize,
    ) -> Self {
        Self { trials, sample_rate_hz, channel_names, session_index }
    }

    pub fn n_trials(&self) -> usize {
        self.trials.len()
    }

    /// Channel count of the first trial (0 for an empty dataset).
    pub fn n_channels(&self) -> usize {
        self.trials.first().map_or(0, |t| t.n_channels())
    }

    /// Sample count of the first trial (0 for an empty dataset).
    pub fn n_samples(&self) -> usize {
        self.trials.first().map_or(0, |t| t.n_samples())
    }

    pub fn labels(&self) -> Vec<i8> {
        self.trials.iter().map(|t| t.label()).collect()
    }

    /// Same data under a new session index (EEGB files do not persist it).
    pub fn with_session_index(mut self, session_index: usize) -> Self {
        self.session_index = session_index;
        self
    }
}

/// One structural problem found by [`validate_dataset`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetIssue {
    EmptyDataset,
    ChannelCountMismatch { trial: usize, expected: usize, got: usize },
    SampleCountMismatch { trial: usize, expected: usize, got: usize },
    SingleClassDataset { label: i8 },
    ChannelNameCountMismatch { names: usize, channels: usize },
    NonPositiveSampleRate,
}

impl std::fmt::Display for DatasetIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DatasetIssue::EmptyDataset => write!(f, "empty dataset"),
            DatasetIssue::ChannelCountMismatch { trial, expected, got } => write!(
                f,
                "channel count mismatch: trial {trial} has {got} channels, expected {expected}"
            ),
            DatasetIssue::SampleCountMismatch { trial, expected, got } => write!(
                f,
                "sample count mismatch: trial {trial} has {got} samples, expected {expected}"
            ),
            DatasetIssue::SingleClassDataset { label } => {
                write!(f, "single-class dataset: every label is {label:+}")
            }
            DatasetIssue::ChannelNameCountMismatch { names, channels } => write!(
                f,
                "channel name count mismatch: {names} names for {channels} channels"
            ),
            DatasetIssue::NonPositiveSampleRate => write!(f, "non-positive sample rate"),
        }
    }
}

/// Checks structural coherence of a dataset and returns every issue found
/// (empty report means the dataset is fit for training).
pub fn validate_dataset(ds: &SessionDataset) -> Vec<DatasetIssue> {
    let mut issues = Vec::new();
    if ds.trials.is_empty() {
        issues.push(DatasetIssue::EmptyDataset);
        return issues;
    }
    let n_channels = ds.trials[0].n_channels();
    let n_samples = ds.trials[0].n_samples();
    for (i, t) in ds.trials.iter().enumerate().skip(1) {
        if t.n_channels() != n_channels {
            issues.push(DatasetIssue::ChannelCountMismatch {
                trial: i,
                expected: n_channels,
                got: t.n_channels(),
            });
        }
        if t.n_samples() != n_samples {
            issues.push(DatasetIssue::SampleCountMismatch {
                trial: i,
                expected: n_samples,
                got: t.n_samples(),
            });
        }
    }
    let labels = ds.labels();
    if labels.iter().all(|&l| l == 1) {
        issues.push(DatasetIssue::SingleClassDataset { label: 1 });
    } else if labels.iter().all(|&l| l == -1) {
        issues.push(DatasetIssue::SingleClassDataset { label: -1 });
    }
    if ds.channel_names.len() != n_channels {
        issues.push(DatasetIssue::ChannelNameCountMismatch {
            names: ds.channel_names.len(),
            channels: n_channels,
        });
    }
    if !(ds.sample_rate_hz > 0.0) {
        issues.push(DatasetIssue::NonPositiveSampleRate);
    }
    issues
}

/// A subset of channels, stored as a bitmask (bit `i` selects channel `i`).
///
/// Canonical ordering of channel sets is ascending bitmask value, which is
/// also the enumeration order of the subset universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelSet {
    bits: u32,
    n_channels: usize,
}

impl ChannelSet {
    /// Builds a channel set under the default minimum of
    /// [`DEFAULT_MIN_CHANNELS`] selected channels.
    pub fn new(bits: u32, n_channels: usize) -> Result<Self> {
        Self::with_min_channels(bits, n_channels, DEFAULT_MIN_CHANNELS)
    }

    /// Builds a channel set requiring at least `min_channels` selected
    /// channels. Generators of planted data use `min_channels = 1`.
    pub fn with_min_channels(bits: u32, n_channels: usize, min_channels: usize) -> Result<Self> {
        if n_channels == 0 || n_channels > MAX_CHANNELS {
            return Err(Error::InvalidConfig(format!(
                "n_channels must be in 1..={MAX_CHANNELS}, got {n_channels}"
            )));
        }
        if n_channels < MAX_CHANNELS && bits >= (1u32 << n_channels) {
            return Err(Error::DimensionMismatch {
                context: format!("mask 0x{bits:x} has bits beyond channel {n_channels}"),
            });
        }
        let pop = bits.count_ones() as usize;
        if pop == 0 {
            return Err(Error::EmptyChannelSet);
        }
        if pop < min_channels {
            return Err(Error::InsufficientChannels { got: pop, required: min_channels });
        }
        Ok(Self { bits, n_channels })
    }

    /// All channels selected.
    pub fn full(n_channels: usize) -> Result<Self> {
        let bits = if n_channels >= MAX_CHANNELS {
            u32::MAX
        } else {
            (1u32 << n_channels) - 1
        };
        Self::with_min_channels(bits, n_channels, 1)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn popcount(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(&self, channel: usize) -> bool {
        channel < self.n_channels && (self.bits >> channel) & 1 == 1
    }

    pub fn is_full(&self) -> bool {
        self.popcount() == self.n_channels
    }

    /// Indices of selected channels, ascending.
    pub fn indices(&self) -> Vec<usize> {
        (0..self.n_channels).filter(|&c| self.contains(c)).collect()
    }
}

impl PartialOrd for ChannelSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ChannelSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.bits, self.n_channels).cmp(&(other.bits, other.n_channels))
    }
}

/// Serialized as a 0/1 vector indexed by channel so model files stay readable.
impl Serialize for ChannelSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<u8> = (0..self.n_channels).map(|c| self.contains(c) as u8).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChannelSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u8>::deserialize(d)?;
        let n_channels = v.len();
        let mut bits = 0u32;
        for (i, &x) in v.iter().enumerate() {
            match x {
                0 => {}
                1 => bits |= 1 << i,
                _ => return Err(serde::de::Error::custom("channel mask entries must be 0 or 1")),
            }
        }
        ChannelSet::with_min_channels(bits, n_channels, 1).map_err(serde::de::Error::custom)
    }
}

/// A closed frequency band `[low_hz, high_hz]` within the global band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "BandRaw")]
pub struct Band {
    low_hz: u32,
    high_hz: u32,
}

#[derive(Deserialize)]
struct BandRaw {
    low_hz: u32,
    high_hz: u32,
}

impl TryFrom<BandRaw> for Band {
    type Error = Error;
    fn try_from(r: BandRaw) -> Result<Self> {
        Band::new(r.low_hz, r.high_hz)
    }
}

impl Band {
    /// Validates the band edges. Width limits (the Length constraint of band
    /// universes, [5, 35] by default) are enforced where universes are built
    /// and verified, not here: filtering operations legitimately accept
    /// narrower bands (for example a [8, 12] mu-band power probe).
    pub fn new(low_hz: u32, high_hz: u32) -> Result<Self> {
        if !(GLOBAL_LOW_HZ <= low_hz && low_hz < high_hz && high_hz <= GLOBAL_HIGH_HZ) {
            return Err(Error::InvalidBand {
                low: low_hz,
                high: high_hz,
                reason: format!(
                    "edges must satisfy {GLOBAL_LOW_HZ} <= low < high <= {GLOBAL_HIGH_HZ}"
                ),
            });
        }
        Ok(Self { low_hz, high_hz })
    }

    /// The global analysis band `[5, 40]`.
    pub fn global() -> Self {
        Self { low_hz: GLOBAL_LOW_HZ, high_hz: GLOBAL_HIGH_HZ }
    }

    pub fn low_hz(&self) -> u32 {
        self.low_hz
    }

    pub fn high_hz(&self) -> u32 {
        self.high_hz
    }

    pub fn width(&self) -> u32 {
        self.high_hz - self.low_hz
    }

    pub fn center(&self) -> f64 {
        (self.low_hz + self.high_hz) as f64 / 2.0
    }

    /// Whether the unit bin `[bin, bin+1)` lies inside this band.
    pub fn contains_bin(&self, bin: u32) -> bool {
        self.low_hz <= bin && bin + 1 <= self.high_hz
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.low_hz, self.high_hz)
    }
}

/// Which family of preconditions a universe (and the models trained on it)
/// draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreconditionMode {
    /// Single full-channel, global-band classifier.
    Plain,
    /// Spatial boosting: channel subsets, global band.
    Sb,
    /// Frequency boosting: full channels, sub-bands.
    Fb,
    /// Spatial-frequency boosting: (subset, sub-band) pairs.
    Sfb,
}

impl PreconditionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PreconditionMode::Plain => "plain",
            PreconditionMode::Sb => "sb",
            PreconditionMode::Fb => "fb",
            PreconditionMode::Sfb => "sfb",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(PreconditionMode::Plain),
            "sb" => Ok(PreconditionMode::Sb),
            "fb" => Ok(PreconditionMode::Fb),
            "sfb" => Ok(PreconditionMode::Sfb),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

/// A (channel subset, frequency band) pair a base learner is trained under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precondition {
    pub channels: ChannelSet,
    pub band: Band,
    pub mode: PreconditionMode,
}

impl Precondition {
    /// Validates the mode-specific shape: SB fixes the band to the global
    /// band, FB fixes the channels to the full set, PLAIN fixes both.
    pub fn new(channels: ChannelSet, band: Band, mode: PreconditionMode) -> Result<Self> {
        match mode {
            PreconditionMode::Sb | PreconditionMode::Plain if band != Band::global() => {
                return Err(Error::InvalidConfig(format!(
                    "{} preconditions must use the global band, got {band}",
                    mode.as_str()
                )));
            }
            _ => {}
        }
        match mode {
            PreconditionMode::Fb | PreconditionMode::Plain if !channels.is_full() => {
                return Err(Error::InvalidConfig(format!(
                    "{} preconditions must use the full channel set",
                    mode.as_str()
                )));
            }
            _ => {}
        }
        Ok(Self { channels, band, mode })
    }

    /// Canonical ordering: ascending channel mask, then band edges.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.channels, self.band).cmp(&(other.channels, other.band))
    }
}

/// Hyperparameters of the boosting trainer. `..Default::default()` gives the
/// published operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostConfig {
    /// Maximum boosting iterations (0 trains an intercept-only model).
    pub k_max: usize,
    /// Fraction of the training-set size drawn from the pool each iteration.
    pub subset_fraction: f64,
    /// Guard constant in the duplication rule d = max(1, floor((1-e)/(e+eps))).
    pub epsilon: f64,
    /// Pool size cap as a multiple of the training-set size.
    pub pool_cap_multiple: usize,
    /// Preconditions scored per iteration (>= universe size disables sampling).
    pub candidate_sample_size: usize,
    /// Number of CSP filters per base learner (even, >= 2).
    pub csp_dim: usize,
    /// SVM regularization parameter C.
    pub svm_cost: f64,
    /// Fraction of trials held out (stratified) for early stopping.
    pub validation_fraction: f64,
    /// Master seed for every random decision in a training run.
    pub rng_seed: u64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            k_max: 60,
            subset_fraction: 0.7,
            epsilon: 0.01,
            pool_cap_multiple: 20,
            candidate_sample_size: 256,
            csp_dim: 4,
            svm_cost: 1.0,
            validation_fraction: 0.1,
            rng_seed: 0,
        }
    }
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.subset_fraction > 0.0 && self.subset_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "subset_fraction must be in (0, 1], got {}",
                self.subset_fraction
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.pool_cap_multiple < 1 {
            return Err(Error::InvalidConfig("pool_cap_multiple must be >= 1".into()));
        }
        if self.candidate_sample_size < 1 {
            return Err(Error::InvalidConfig("candidate_sample_size must be >= 1".into()));
        }
        if self.csp_dim < 2 || self.csp_dim % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "csp_dim must be even and >= 2, got {}",
                self.csp_dim
            )));
        }
        if !(self.svm_cost > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "svm_cost must be positive, got {}",
                self.svm_cost
            )));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::InvalidConfig(format!(
                "validation_fraction must be in [0, 1), got {}",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn trial(vals: &[[f64; 2]], label: i8) -> TrialMatrix {
        TrialMatrix::new(arr2(vals), label).unwrap()
    }

    #[test]
    fn trial_rejects_bad_labels_and_nan() {
        let ok = arr2(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(TrialMatrix::new(ok.clone(), 1).is_ok());
        assert!(TrialMatrix::new(ok.clone(), -1).is_ok());
        let err = TrialMatrix::new(ok.clone(), 0).unwrap_err();
        assert!(err.to_string().contains("invalid label"));
        let err = TrialMatrix::new(ok, 2).unwrap_err();
        assert!(err.to_string().contains("invalid label"));
        let bad = arr2(&[[f64::NAN, 1.0], [1.0, 0.0]]);
        let err = TrialMatrix::new(bad, 1).unwrap_err();
        assert!(err.to_string().contains("non-finite samples"));
    }

    #[test]
    fn validate_reports_channel_mismatch() {
        let t1 = trial(&[[0.0, 1.0], [1.0, 0.0]], 1);
        let t2 = TrialMatrix::new(arr2(&[[0.0], [1.0]]), -1).unwrap();
        let ds = SessionDataset::new(vec![t1, t2], 256.0, vec!["a".into(), "b".into()], 0);
        let report = validate_dataset(&ds);
        assert!(report
            .iter()
            .any(|i| i.to_string().contains("channel count mismatch")));
    }

    #[test]
    fn validate_reports_single_class() {
        let t1 = trial(&[[0.0, 1.0], [1.0, 0.0]], 1);
        let t2 = trial(&[[0.5, 1.0], [1.0, 0.5]], 1);
        let ds = SessionDataset::new(vec![t1, t2], 256.0, vec!["a".into(), "b".into()], 0);
        let report = validate_dataset(&ds);
        assert_eq!(report.len(), 1);
        assert!(report[0].to_string().contains("single-class dataset"));
    }

    #[test]
    fn validate_passes_clean_dataset() {
        let t1 = trial(&[[0.0, 1.0], [1.0, 0.0]], 1);
        let t2 = trial(&[[0.5, 1.0], [1.0, 0.5]], -1);
        let ds = SessionDataset::new(vec![t1, t2], 256.0, vec!["a".into(), "b".into()], 0);
        assert!(validate_dataset(&ds).is_empty());
    }

    #[test]
    fn validate_reports_empty() {
        let ds = SessionDataset::new(vec![], 256.0, vec![], 0);
        assert_eq!(validate_dataset(&ds), vec![DatasetIssue::EmptyDataset]);
    }

    #[test]
    fn channel_set_enforces_minimum() {
        let err = ChannelSet::new(0b0000_0000_0111, 12).unwrap_err();
        assert!(err.to_string().contains("insufficient channels"));
        let ok = ChannelSet::new(0b0000_0000_1111, 12).unwrap();
        assert_eq!(ok.popcount(), 4);
        assert_eq!(ok.indices(), vec![0, 1, 2, 3]);
        let err = ChannelSet::with_min_channels(0, 12, 1).unwrap_err();
        assert!(matches!(err, Error::EmptyChannelSet));
    }

    #[test]
    fn channel_set_rejects_out_of_range_bits() {
        assert!(ChannelSet::with_min_channels(1 << 12, 12, 1).is_err());
        assert!(ChannelSet::full(12).unwrap().is_full());
        assert_eq!(ChannelSet::full(12).unwrap().bits(), 0xFFF);
    }

    #[test]
    fn channel_set_serde_round_trip() {
        let cs = ChannelSet::new(0b1010_1010_1010, 12).unwrap();
        let json = serde_json::to_string(&cs).unwrap();
        assert_eq!(json, "[0,1,0,1,0,1,0,1,0,1,0,1]");
        let back: ChannelSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cs);
    }

    #[test]
    fn band_edges_validated() {
        assert!(Band::new(5, 40).is_ok());
        assert!(Band::new(8, 13).is_ok());
        assert!(Band::new(4, 12).is_err());
        assert!(Band::new(5, 41).is_err());
        assert!(Band::new(12, 12).is_err());
        assert!(Band::new(20, 10).is_err());
        // narrow bands are valid at the type level; universes enforce widths
        assert!(Band::new(8, 12).is_ok());
        assert_eq!(Band::global().width(), 35);
    }

    #[test]
    fn band_bin_containment() {
        let b = Band::new(10, 15).unwrap();
        assert!(b.contains_bin(10));
        assert!(b.contains_bin(14));
        assert!(!b.contains_bin(15));
        assert!(!b.contains_bin(9));
    }

    #[test]
    fn precondition_mode_shapes() {
        let full = ChannelSet::full(12).unwrap();
        let sub = ChannelSet::new(0b1111, 12).unwrap();
        let g = Band::global();
        let b = Band::new(8, 13).unwrap();
        assert!(Precondition::new(sub, g, PreconditionMode::Sb).is_ok());
        assert!(Precondition::new(sub, b, PreconditionMode::Sb).is_err());
        assert!(Precondition::new(full, b, PreconditionMode::Fb).is_ok());
        assert!(Precondition::new(sub, b, PreconditionMode::Fb).is_err());
        assert!(Precondition::new(full, g, PreconditionMode::Plain).is_ok());
        assert!(Precondition::new(full, b, PreconditionMode::Plain).is_err());
        assert!(Precondition::new(sub, b, PreconditionMode::Sfb).is_ok());
    }

    #[test]
    fn boost_config_defaults_validate() {
        let c = BoostConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.k_max, 60);
        assert_eq!(c.candidate_sample_size, 256);
        let bad = BoostConfig { csp_dim: 3, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = BoostConfig { subset_fraction: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = BoostConfig { validation_fraction: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn boost_config_partial_json_fills_defaults() {
        let c: BoostConfig = serde_json::from_str(r#"{"k_max": 5, "rng_seed": 7}"#).unwrap();
        assert_eq!(c.k_max, 5);
        assert_eq!(c.rng_seed, 7);
        assert_eq!(c.subset_fraction, 0.7);
        assert_eq!(c.pool_cap_multiple, 20);
    }
}
