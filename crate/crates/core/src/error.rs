//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Error`]. Variants carry
//! enough context to debug a failing pipeline without chasing panics; message
//! text is stable and matched by integration tests.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A trial (or other numeric input) contains NaN or infinite values.
    #[error("non-finite samples in {context}")]
    NonFiniteSamples { context: String },

    /// A band-pass request cannot be satisfied at the given sample rate.
    #[error("band above Nyquist: [{low}, {high}] Hz at {sample_rate} Hz")]
    BandAboveNyquist { low: u32, high: u32, sample_rate: f64 },

    /// A band violates the global band-edge or length constraints.
    #[error("invalid band [{low}, {high}]: {reason}")]
    InvalidBand { low: u32, high: u32, reason: String },

    /// A channel mask selected zero channels.
    #[error("empty channel set")]
    EmptyChannelSet,

    /// A channel mask selects fewer channels than the configured minimum.
    #[error("insufficient channels: {got} selected, {required} required")]
    InsufficientChannels { got: usize, required: usize },

    /// A trial carries no usable signal (zero variance where variance is needed).
    #[error("degenerate trial: {context}")]
    DegenerateTrial { context: String },

    /// Training was asked to fit with only one class present.
    #[error("single-class training set")]
    SingleClassTrainingSet,

    /// Vector/matrix dimensions do not line up.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// Exhaustive channel-subset enumeration was requested for too many channels.
    #[error("universe too large; use sampler (n_channels = {n_channels}, limit = {limit})")]
    UniverseTooLarge { n_channels: usize, limit: usize },

    /// Every candidate precondition failed base-learner training.
    #[error("no viable candidate: all {n_candidates} candidate preconditions failed training")]
    NoViableCandidate { n_candidates: usize },

    /// An importance vector was empty or summed to zero.
    #[error("empty profile: {context}")]
    EmptyProfile { context: String },

    /// A dataset holds no trials.
    #[error("empty dataset")]
    EmptyDataset,

    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Byte stream is not an EEGB file (bad magic or unsupported version).
    #[error("not an EEGB file: {reason}")]
    NotEegb { reason: String },

    /// Byte stream ended early or has trailing garbage relative to its header.
    #[error("length mismatch: {context}")]
    LengthMismatch { context: String },

    /// A label on disk or in memory is outside {-1, +1}.
    #[error("invalid label: {value}")]
    InvalidLabel { value: i32 },

    /// A dataset failed structural validation before training.
    #[error("dataset validation failed: {0}")]
    InvalidDataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
