//! Time-series preprocessing: detrending, brick-wall band-pass filtering,
//! channel projection, and trial covariance.
//!
//! The band-pass is a zero-phase FFT mask: forward transform per channel, zero
//! every bin whose absolute frequency falls outside the closed band, inverse
//! transform. That makes it exactly linear, exactly idempotent per band, and
//! exactly commutative with channel projection — properties the boosting
//! engine's caching layer relies on.

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::types::{Band, ChannelSet, TrialMatrix};

/// Removes the least-squares line (intercept + slope) from each channel.
pub fn detrend(trial: &TrialMatrix) -> Result<TrialMatrix> {
    let x = trial.samples();
    let n = x.nrows();
    let nf = n as f64;
    let t_mean = (nf - 1.0) / 2.0;
    // sum of (t - t_mean)^2 for t = 0..n-1: n (n^2 - 1) / 12
    let t_var = nf * (nf * nf - 1.0) / 12.0;

    let mut out = Array2::<f64>::zeros(x.raw_dim());
    for c in 0..x.ncols() {
        let mut sum = 0.0;
        let mut cov = 0.0;
        for t in 0..n {
            sum += x[[t, c]];
            cov += (t as f64 - t_mean) * x[[t, c]];
        }
        let mean = sum / nf;
        let slope = if t_var > 0.0 { cov / t_var } else { 0.0 };
        for t in 0..n {
            out[[t, c]] = x[[t, c]] - (mean + slope * (t as f64 - t_mean));
        }
    }
    TrialMatrix::new(out, trial.label())
}

/// Zero-phase brick-wall band-pass. Keeps FFT bins with `low <= |f| <= high`
/// (closed interval), zeroes the rest. Requires `fs > 2 * high`.
pub fn bandpass(trial: &TrialMatrix, band: Band, sample_rate_hz: f64) -> Result<TrialMatrix> {
    if !(sample_rate_hz > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sample rate must be positive, got {sample_rate_hz}"
        )));
    }
    if sample_rate_hz <= 2.0 * band.high_hz() as f64 {
        return Err(Error::BandAboveNyquist {
            low: band.low_hz(),
            high: band.high_hz(),
            sample_rate: sample_rate_hz,
        });
    }
    let x = trial.samples();
    let n = x.nrows();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let low = band.low_hz() as f64;
    let high = band.high_hz() as f64;
    let keep: Vec<bool> = (0..n)
        .map(|k| {
            let fold = k.min(n - k); // |f_k| = fold * fs / n
            let f = fold as f64 * sample_rate_hz / n as f64;
            (low..=high).contains(&f)
        })
        .collect();

    let mut out = Array2::<f64>::zeros(x.raw_dim());
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..x.ncols() {
        for t in 0..n {
            buf[t] = Complex64::new(x[[t, c]], 0.0);
        }
        forward.process(&mut buf);
        for (k, b) in buf.iter_mut().enumerate() {
            if !keep[k] {
                *b = Complex64::new(0.0, 0.0);
            }
        }
        inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        for t in 0..n {
            out[[t, c]] = buf[t].re * scale;
        }
    }
    TrialMatrix::new(out, trial.label())
}

/// Keeps only the channels selected by `mask`, in ascending channel order.
pub fn project_channels(trial: &TrialMatrix, mask: &ChannelSet) -> Result<TrialMatrix> {
    if mask.n_channels() != trial.n_channels() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "mask covers {} channels, trial has {}",
                mask.n_channels(),
                trial.n_channels()
            ),
        });
    }
    let cols = mask.indices();
    let x = trial.samples();
    let mut out = Array2::<f64>::zeros((x.nrows(), cols.len()));
    for (j, &c) in cols.iter().enumerate() {
        for t in 0..x.nrows() {
            out[[t, j]] = x[[t, c]];
        }
    }
    TrialMatrix::new(out, trial.label())
}

/// Gram matrix `X' X` of a trial (unnormalized scatter), accumulated entry by
/// entry in time order. Computing it this way makes the scatter of a projected
/// trial bit-identical to the corresponding submatrix of the full scatter,
/// which the training cache exploits.
pub fn trial_scatter(samples: &Array2<f64>) -> Array2<f64> {
    let n = samples.nrows();
    let c = samples.ncols();
    let mut s = Array2::<f64>::zeros((c, c));
    for i in 0..c {
        for j in i..c {
            let mut acc = 0.0;
            for t in 0..n {
                acc += samples[[t, i]] * samples[[t, j]];
            }
            s[[i, j]] = acc;
            s[[j, i]] = acc;
        }
    }
    s
}

/// Extracts the scatter submatrix for the selected channels. Equals
/// `trial_scatter(project_channels(trial, mask))` bit for bit.
pub fn scatter_submatrix(scatter: &Array2<f64>, mask: &ChannelSet) -> Array2<f64> {
    let cols = mask.indices();
    let k = cols.len();
    let mut s = Array2::<f64>::zeros((k, k));
    for (a, &i) in cols.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            s[[a, b]] = scatter[[i, j]];
        }
    }
    s
}

/// A trace-normalized trial covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    values: Array2<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry (1e-10), unit trace (1e-8), and positive
    /// semidefiniteness (eigenvalues >= -1e-8).
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let n = values.nrows();
        if n == 0 || values.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: format!("covariance must be square, got {} x {}", n, values.ncols()),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteSamples { context: "covariance".into() });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (values[[i, j]] - values[[j, i]]).abs() > 1e-10 {
                    return Err(Error::DimensionMismatch {
                        context: format!("covariance not symmetric at ({i}, {j})"),
                    });
                }
            }
        }
        let trace: f64 = (0..n).map(|i| values[[i, i]]).sum();
        if (trace - 1.0).abs() > 1e-8 {
            return Err(Error::DegenerateTrial {
                context: format!("covariance trace {trace} != 1"),
            });
        }
        let eig = crate::linalg::sym_eigen(&values)?;
        if eig.values.iter().any(|&v| v < -1e-8) {
            return Err(Error::DegenerateTrial {
                context: "covariance not positive semidefinite".into(),
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }
}

/// Trace-normalized covariance of one trial: `X'X / trace(X'X)`.
pub fn covariance_normalized(trial: &TrialMatrix) -> Result<CovarianceMatrix> {
    let scatter = trial_scatter(trial.samples());
    normalize_scatter(&scatter)
}

/// Trace-normalizes a precomputed scatter matrix.
pub fn normalize_scatter(scatter: &Array2<f64>) -> Result<CovarianceMatrix> {
    let n = scatter.nrows();
    let trace: f64 = (0..n).map(|i| scatter[[i, i]]).sum();
    if !(trace > 0.0) || !trace.is_finite() {
        return Err(Error::DegenerateTrial {
            context: format!("zero or non-finite signal power (trace = {trace})"),
        });
    }
    CovarianceMatrix::new(scatter / trace)
}
