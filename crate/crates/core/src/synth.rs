//! Synthetic session generator with planted spatial-spectral class
//! signatures, and drift schedules that migrate the plant across sessions.
//!
//! Every channel carries unit-power broadband noise (white Gaussian noise
//! brickwall-filtered to [5, 40] Hz and normalized per trial). Planted
//! channels additionally receive a single amplitude-modulated narrowband
//! source process inside the planted band — one cortical source coherently
//! projected onto every planted electrode — whose amplitude depends on the
//! class label: `a * (1 + DELTA)` for +1 and `a * (1 - DELTA)` for -1, with
//! `a` fixed by the requested signal-to-noise ratio. The shared waveform is
//! what spatial filters exploit: combining planted channels averages their
//! independent noise while preserving the common signal, so channel subsets
//! covering the whole planted group dominate partial views. The class
//! information is purely a variance shift, which is what CSP features
//! capture.
//!
//! Difficulty knobs (module constants below) add per-(trial, channel)
//! amplitude jitter, occasional multi-channel low-frequency artifact bursts
//! (blink/movement-like) on non-planted channels, and a slow per-channel
//! gain drift across the session. Artifacts corrupt wide-band features of
//! whichever channels they hit without touching typical planted bands, and
//! drift pulls late-session covariances away from the early trials, so
//! single full-channel classifiers plateau below ensembles that can route
//! around contaminated channels.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsp::bandpass;
use crate::error::{Error, Result};
use crate::seed::{self, Domain};
use crate::types::{Band, ChannelSet, SessionDataset, TrialMatrix, GLOBAL_HIGH_HZ};

/// Relative class amplitude offset: +1 trials get `a(1 + DELTA)`, -1 trials
/// `a(1 - DELTA)`.
pub const DELTA: f64 = 0.5;

/// Log-normal sigma of the per-(trial, planted-channel) signal amplitude
/// jitter; spreads the class-conditional power distributions so they
/// overlap. The distribution is normalized to unit mean power, keeping the
/// snr -> amplitude mapping exact. Kept moderate on purpose: jitter hits the
/// planted channels themselves, so trials it ruins are ruined for every
/// channel subset at once and no ensemble member can repair them.
pub const AMP_JITTER_SIGMA: f64 = 0.45;

/// Log-normal sigma of the per-(trial, channel) broadband noise gain, also
/// normalized to unit mean power.
pub const NOISE_GAIN_SIGMA: f64 = 0.2;

/// Probability that a non-planted channel carries a spontaneous idle-rhythm
/// burst inside the planted band on a given trial. These distractors are the
/// main classifier-difficulty knob: they are class-uncorrelated, so a
/// spatial filter that leans on a bursting channel reads noise that looks
/// spectrally identical to signal. Because bursts are channel-local and
/// independent across trials, ensemble members built on different channel
/// subsets err on different trials — errors one member makes, another fixes
/// — while a full-channel learner is exposed to every bursting channel at
/// once.
pub const DISTRACTOR_PROB: f64 = 0.25;

/// In-band power of one distractor burst as a fraction of the planted-signal
/// power implied by the requested snr. Near 1 a burst is indistinguishable
/// in band power from the real source on a single channel.
pub const DISTRACTOR_SNR_FRACTION: f64 = 0.6;

/// Sigma of the per-(session, non-planted channel) slow gain drift. Channel
/// `c` carries the log-power ramp `beta_c * (t / (n_trials - 1) - 1/2)`
/// across the session, the electrode-impedance style nonstationarity of
/// drying gel and shifting caps. Models that lean on a drifting channel pay
/// twice: the moving covariance smears the CSP whitening basis fit on the
/// full session, and time-ordered train/test splits turn the tail of the
/// ramp into a train-test mismatch. Both costs grow with every drifting
/// channel a model uses, which is what lets channel-subset ensembles hold up
/// where full-channel learners degrade.
pub const CHANNEL_DRIFT_SIGMA: f64 = 1.0;

/// Band occupied by artifact bursts: low frequencies, as for ocular and
/// movement artifacts. Disjoint from typical planted bands, so artifacts
/// pollute wide-band features but not narrow high-frequency ones.
pub const ARTIFACT_BAND: (u32, u32) = (5, 15);

/// Probability that a trial carries an artifact event (one shared burst on a
/// few non-planted channels). Kept well below 1 so bursts stay sparse per
/// channel — violent enough to corrupt the trials they land on, yet rare
/// enough per channel that CSP whitening cannot absorb them into the average
/// class covariances.
pub const ARTIFACT_PROB: f64 = 0.45;

/// How many non-planted channels one artifact event hits (inclusive range).
/// Blinks and movements project onto several neighboring electrodes at once;
/// a multi-channel footprint costs a spatial filter more directions to
/// cancel than a single-channel spike would (each hit channel carries its
/// own waveform, so the event has full spatial rank).
pub const ARTIFACT_CHANNELS: std::ops::RangeInclusive<usize> = 2..=3;

/// Amplitude range of the unit-power artifact waveform, relative to the
/// channel's unit-power background noise.
pub const ARTIFACT_GAIN: std::ops::Range<f64> = 8.0..16.0;

/// Specification of one synthetic session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub planted_channels: ChannelSet,
    pub planted_band: Band,
    /// Ratio of class-mean discriminative band power to broadband noise
    /// power on planted channels.
    pub snr: f64,
    /// Total trial count; classes are balanced, so this must be even.
    pub n_trials: usize,
    pub n_samples: usize,
    pub sample_rate_hz: f64,
    pub seed: u64,
}

impl PlantSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 || self.n_trials % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "n_trials must be even and positive, got {}",
                self.n_trials
            )));
        }
        if self.n_samples < 8 {
            return Err(Error::InvalidConfig(format!(
                "n_samples must be >= 8, got {}",
                self.n_samples
            )));
        }
        if !(self.snr.is_finite() && self.snr > 0.0) {
            return Err(Error::InvalidConfig(format!("snr must be positive, got {}", self.snr)));
        }
        if !(self.sample_rate_hz.is_finite()
            && self.sample_rate_hz > 2.0 * f64::from(GLOBAL_HIGH_HZ))
        {
            return Err(Error::InvalidConfig(format!(
                "sample rate {} Hz cannot carry the {} Hz global band edge",
                self.sample_rate_hz, GLOBAL_HIGH_HZ
            )));
        }
        Ok(())
    }

    pub fn n_channels(&self) -> usize {
        self.planted_channels.n_channels()
    }

    /// Class-mean signal amplitude: mean class power `a^2 (1 + DELTA^2)`
    /// equals `snr` times the unit noise power.
    fn base_amplitude(&self) -> f64 {
        (self.snr / (1.0 + DELTA * DELTA)).sqrt()
    }
}

fn standard_normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Brickwall-filter a single channel's samples to `band` and normalize to
/// unit mean-square power.
fn filtered_unit_power(
    samples: Vec<f64>,
    band: Band,
    sample_rate_hz: f64,
    context: &str,
) -> Result<Vec<f64>> {
    let n = samples.len();
    let trial = TrialMatrix::new(
        Array2::from_shape_vec((n, 1), samples).expect("shape fixed"),
        1,
    )?;
    let filtered = bandpass(&trial, band, sample_rate_hz)?;
    let col: Vec<f64> = filtered.samples().column(0).to_vec();
    let power = col.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if power <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateTrial { context: context.into() });
    }
    let scale = power.sqrt().recip();
    Ok(col.into_iter().map(|v| v * scale).collect())
}

/// Unit-power narrowband waveform shaped by a random burst envelope. Draws
/// the carrier first and the envelope second from the same stream; the
/// shaping is re-normalized so per-trial power stays exactly 1.
fn enveloped_narrowband(
    rng: &mut ChaCha8Rng,
    band: Band,
    sample_rate_hz: f64,
    n_samples: usize,
    context: &str,
) -> Result<Vec<f64>> {
    let white = standard_normals(rng, n_samples);
    let narrowband = filtered_unit_power(white, band, sample_rate_hz, context)?;
    let env = burst_envelope(rng, n_samples, sample_rate_hz);
    let shaped: Vec<f64> = narrowband.iter().zip(&env).map(|(s, e)| s * e).collect();
    let power = shaped.iter().map(|v| v * v).sum::<f64>() / n_samples as f64;
    if power <= f64::MIN_POSITIVE {
        // Extremely unlikely (envelope nearly zero everywhere); fall back to
        // the unshaped carrier.
        Ok(narrowband)
    } else {
        let s = power.sqrt().recip();
        Ok(shaped.into_iter().map(|v| v * s).collect())
    }
}

/// Smooth burst envelope: 2-4 Hann bumps at random positions/widths,
/// clipped at 1. Bursts shape the signal in time without changing its
/// per-trial power (the signal is re-normalized afterwards).
fn burst_envelope(rng: &mut ChaCha8Rng, n_samples: usize, sample_rate_hz: f64) -> Vec<f64> {
    let mut env = vec![0.0f64; n_samples];
    let n_bursts = rng.gen_range(2..=4usize);
    for _ in 0..n_bursts {
        let center = rng.gen_range(0..n_samples) as isize;
        let half = (sample_rate_hz * rng.gen_range(0.25..0.75)) as isize;
        for t in (center - half).max(0)..(center + half).min(n_samples as isize) {
            let phase = (t - center) as f64 / half as f64; // in (-1, 1)
            env[t as usize] += 0.5 * (1.0 + (std::f64::consts::PI * phase).cos());
        }
    }
    for v in &mut env {
        *v = v.min(1.0);
    }
    env
}

/// Generates one deterministic session from a spec. Labels are balanced and
/// shuffled; trial content is a pure function of `(seed, trial, channel)`.
pub fn generate_session(spec: &PlantSpec) -> Result<SessionDataset> {
    spec.validate()?;
    let n_channels = spec.n_channels();
    let n = spec.n_samples;
    let fs = spec.sample_rate_hz;

    let mut labels = vec![1i8; spec.n_trials / 2];
    labels.extend(vec![-1i8; spec.n_trials / 2]);
    let mut label_rng = seed::rng(spec.seed, Domain::SynthLabels, &[]);
    seed::shuffle(&mut labels, &mut label_rng);

    let amplitude = spec.base_amplitude();
    let trials: Vec<TrialMatrix> = (0..spec.n_trials)
        .into_par_iter()
        .map(|trial_id| -> Result<TrialMatrix> {
            let label = labels[trial_id];
            let session_position = trial_id as f64 / (spec.n_trials - 1).max(1) as f64;
            // At most one artifact event per trial, hitting a few random
            // non-planted channels (a blink or movement projects onto
            // neighboring electrodes). Events stay sparse per channel, so
            // they corrupt the trials they land on instead of inflating the
            // average class covariances (which CSP whitening would simply
            // normalize away). Each hit channel gets its own waveform: a
            // shared waveform would be a rank-one spatial component that one
            // filter direction cancels, while independent bursts occupy as
            // many directions as channels hit — more than a filter bank fit
            // on a small subset can spare.
            let artifact_hit: Option<Vec<(usize, f64, Vec<f64>)>> = {
                let mut art_rng =
                    seed::rng(spec.seed, Domain::SynthArtifact, &[trial_id as u64]);
                let roll: f64 = art_rng.gen_range(0.0..1.0);
                let mut victims: Vec<usize> =
                    (0..n_channels).filter(|&c| !spec.planted_channels.contains(c)).collect();
                if roll < ARTIFACT_PROB && !victims.is_empty() {
                    seed::shuffle(&mut victims, &mut art_rng);
                    victims.truncate(art_rng.gen_range(ARTIFACT_CHANNELS));
                    let band = Band::new(ARTIFACT_BAND.0, ARTIFACT_BAND.1)?;
                    let hits = victims
                        .into_iter()
                        .map(|c| {
                            let g = art_rng.gen_range(ARTIFACT_GAIN);
                            let white = standard_normals(&mut art_rng, n);
                            let burst = filtered_unit_power(
                                white,
                                band,
                                fs,
                                "synthetic artifact",
                            )?;
                            Ok((c, g, burst))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Some(hits)
                } else {
                    None
                }
            };
            // One narrowband source waveform shared by all planted channels:
            // a single cortical source seen by several electrodes. The
            // coherent projection is what a spatial filter can exploit —
            // summing the planted channels averages their independent noise
            // but keeps the common signal, so subsets containing the whole
            // planted group separate the classes better than any partial
            // view.
            let source = {
                let mut sig_rng =
                    seed::rng(spec.seed, Domain::SynthSignal, &[trial_id as u64]);
                enveloped_narrowband(&mut sig_rng, spec.planted_band, fs, n, "synthetic signal")?
            };
            let mut samples = Array2::zeros((n, n_channels));
            for c in 0..n_channels {
                let mut rng =
                    seed::rng(spec.seed, Domain::SynthNoise, &[trial_id as u64, c as u64]);
                // Draw the per-channel modifiers before the sample stream so
                // the stream layout stays stable.
                let gain_z: f64 = rng.sample(StandardNormal);
                // exp(sigma z - sigma^2) has unit mean power E[gain^2] = 1.
                let mut gain =
                    (NOISE_GAIN_SIGMA * gain_z - NOISE_GAIN_SIGMA * NOISE_GAIN_SIGMA).exp();
                let planted = spec.planted_channels.contains(c);
                if !planted {
                    let beta: f64 = seed::rng(spec.seed, Domain::SynthDrift, &[c as u64])
                        .sample(StandardNormal);
                    gain *=
                        (CHANNEL_DRIFT_SIGMA * beta * (session_position - 0.5)).exp();
                }
                let white = standard_normals(&mut rng, n);
                let noise =
                    filtered_unit_power(white, Band::global(), fs, "synthetic noise")?;
                for (t, v) in noise.into_iter().enumerate() {
                    samples[[t, c]] = gain * v;
                }
                if let Some(hits) = &artifact_hit {
                    if let Some((_, g, burst)) = hits.iter().find(|(hit, _, _)| *hit == c) {
                        for (t, v) in burst.iter().enumerate() {
                            samples[[t, c]] += g * v;
                        }
                    }
                }
                if !planted {
                    let mut dis_rng = seed::rng(
                        spec.seed,
                        Domain::SynthDistractor,
                        &[trial_id as u64, c as u64],
                    );
                    if dis_rng.gen_range(0.0..1.0) < DISTRACTOR_PROB {
                        let amp = (DISTRACTOR_SNR_FRACTION * spec.snr).sqrt();
                        let burst = enveloped_narrowband(
                            &mut dis_rng,
                            spec.planted_band,
                            fs,
                            n,
                            "synthetic distractor",
                        )?;
                        for (t, v) in burst.into_iter().enumerate() {
                            samples[[t, c]] += amp * v;
                        }
                    }
                }

                if planted {
                    let mut rng = seed::rng(
                        spec.seed,
                        Domain::SynthSignal,
                        &[trial_id as u64, c as u64],
                    );
                    let amp_z: f64 = rng.sample(StandardNormal);
                    let class_scale = if label == 1 { 1.0 + DELTA } else { 1.0 - DELTA };
                    let jitter =
                        (AMP_JITTER_SIGMA * amp_z - AMP_JITTER_SIGMA * AMP_JITTER_SIGMA).exp();
                    let amp = amplitude * class_scale * jitter;
                    for (t, v) in source.iter().enumerate() {
                        samples[[t, c]] += amp * v;
                    }
                }
            }
            TrialMatrix::new(samples, label)
        })
        .collect::<Result<Vec<_>>>()?;

    let channel_names = (0..n_channels).map(|c| format!("ch{:02}", c)).collect();
    Ok(SessionDataset::new(trials, fs, channel_names, 0))
}

/// A series of per-session plant specs modeling gradual drift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSchedule {
    pub sessions: Vec<PlantSpec>,
}

impl DriftSchedule {
    /// Generates every session, tagging each with its session index.
    pub fn generate_all(&self) -> Result<Vec<SessionDataset>> {
        self.sessions
            .iter()
            .enumerate()
            .map(|(t, spec)| Ok(generate_session(spec)?.with_session_index(t)))
            .collect()
    }
}

/// Rounds half away from zero (25.5 -> 26, -25.5 -> -26).
fn round_half_away(v: f64) -> i64 {
    v.round() as i64
}

/// Linear band-center interpolation (width preserved, edges rounded half
/// away from zero) plus stepwise channel migration between two equally-sized
/// channel sets. Session `t` reuses the base spec with `seed + t`.
pub fn generate_drift_series(
    n_sessions: usize,
    start_band: Band,
    end_band: Band,
    start_channels: ChannelSet,
    end_channels: ChannelSet,
    base: &PlantSpec,
) -> Result<DriftSchedule> {
    if n_sessions < 2 {
        return Err(Error::InvalidConfig(format!(
            "drift series needs >= 2 sessions, got {n_sessions}"
        )));
    }
    if start_band.width() != end_band.width() {
        return Err(Error::InvalidConfig(format!(
            "incompatible band widths: {start_band} vs {end_band}"
        )));
    }
    if start_channels.n_channels() != end_channels.n_channels()
        || start_channels.popcount() != end_channels.popcount()
    {
        return Err(Error::InvalidConfig(
            "channel migration requires equally sized sets over the same layout".into(),
        ));
    }
    let n_channels = start_channels.n_channels();
    let start_only: Vec<usize> = start_channels
        .indices()
        .into_iter()
        .filter(|&c| !end_channels.contains(c))
        .collect();
    let end_only: Vec<usize> = end_channels
        .indices()
        .into_iter()
        .filter(|&c| !start_channels.contains(c))
        .collect();
    let width = start_band.width();
    let mut sessions = Vec::with_capacity(n_sessions);
    for t in 0..n_sessions {
        let frac = t as f64 / (n_sessions - 1) as f64;
        let low = round_half_away(
            f64::from(start_band.low_hz())
                + frac * (f64::from(end_band.low_hz()) - f64::from(start_band.low_hz())),
        ) as u32;
        let band = Band::new(low, low + width)?;

        let swapped = round_half_away(frac * start_only.len() as f64) as usize;
        let mut bits = start_channels.bits();
        for i in 0..swapped {
            bits &= !(1u32 << start_only[i]);
            bits |= 1u32 << end_only[i];
        }
        let channels = ChannelSet::with_min_channels(bits, n_channels, 1)?;

        sessions.push(PlantSpec {
            planted_channels: channels,
            planted_band: band,
            seed: base.seed + t as u64,
            ..base.clone()
        });
    }
    Ok(DriftSchedule { sessions })
}
