//! Precondition universes: the channel subsets, sub-bands, and
//! (subset, band) pairs a boosting run selects its base learners from.
//!
//! Universes are always in canonical order — ascending channel-mask value,
//! then ascending band edges — and every sampling decision is seeded, so a
//! universe is a pure function of its configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Domain};
use crate::types::{
    Band, ChannelSet, Precondition, PreconditionMode, DEFAULT_MIN_CHANNELS, GLOBAL_HIGH_HZ,
    GLOBAL_LOW_HZ,
};

/// Exhaustive subset enumeration is capped at this channel count.
pub const ENUMERATION_LIMIT: usize = 20;

/// Sliding-window generator spec for the sub-band universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandUniverseSpec {
    pub global_low_hz: u32,
    pub global_high_hz: u32,
    /// Window lengths in Hz, paired index-wise with `strides`.
    pub window_lengths: Vec<u32>,
    pub strides: Vec<u32>,
}

impl Default for BandUniverseSpec {
    fn default() -> Self {
        Self {
            global_low_hz: GLOBAL_LOW_HZ,
            global_high_hz: GLOBAL_HIGH_HZ,
            window_lengths: vec![5, 10, 15, 20, 25, 30, 35],
            strides: vec![2, 3, 4, 5, 5, 5, 5],
        }
    }
}

impl BandUniverseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(GLOBAL_LOW_HZ <= self.global_low_hz
            && self.global_low_hz < self.global_high_hz
            && self.global_high_hz <= GLOBAL_HIGH_HZ)
        {
            return Err(Error::InvalidConfig(format!(
                "global band [{}, {}] must lie within [{GLOBAL_LOW_HZ}, {GLOBAL_HIGH_HZ}]",
                self.global_low_hz, self.global_high_hz
            )));
        }
        if self.window_lengths.is_empty() {
            return Err(Error::InvalidConfig("window_lengths must not be empty".into()));
        }
        if self.window_lengths.len() != self.strides.len() {
            return Err(Error::InvalidConfig(format!(
                "{} window lengths vs {} strides",
                self.window_lengths.len(),
                self.strides.len()
            )));
        }
        let span = self.global_high_hz - self.global_low_hz;
        for &w in &self.window_lengths {
            if !(5..=35).contains(&w) {
                return Err(Error::InvalidConfig(format!(
                    "window length {w} outside [5, 35]"
                )));
            }
            if w > span {
                return Err(Error::InvalidConfig(format!(
                    "window length {w} exceeds global span {span}"
                )));
            }
        }
        if self.strides.iter().any(|&s| s == 0) {
            return Err(Error::InvalidConfig("strides must be >= 1".into()));
        }
        Ok(())
    }

    pub fn global_band(&self) -> Result<Band> {
        Band::new(self.global_low_hz, self.global_high_hz)
    }
}

/// Slides each (length, stride) window across the global band, completes the
/// right edge with `[high - w, high]`, deduplicates, and sorts by (low, high).
pub fn generate_band_universe(spec: &BandUniverseSpec) -> Result<Vec<Band>> {
    spec.validate()?;
    let mut set = std::collections::BTreeSet::new();
    for (&w, &s) in spec.window_lengths.iter().zip(&spec.strides) {
        let mut low = spec.global_low_hz;
        while low + w <= spec.global_high_hz {
            set.insert((low, low + w));
            low += s;
        }
        set.insert((spec.global_high_hz - w, spec.global_high_hz));
    }
    set.into_iter().map(|(l, h)| Band::new(l, h)).collect()
}

/// Constraint verification for a band system over a global band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandConstraintReport {
    /// Every unit bin of the global band covered at least once.
    pub cover_ok: bool,
    /// Every band width within [5, 35].
    pub length_ok: bool,
    /// Every unit bin covered at least twice.
    pub overlap_ok: bool,
    /// Coverage count per unit bin `[low, low+1)` of the global band.
    pub coverage_counts: Vec<u32>,
    pub min_coverage: u32,
    pub max_coverage: u32,
}

/// Counts per-unit-bin coverage and checks the Cover / Length / Overlap
/// constraints. Exact coverage equality is deliberately not required; the
/// count vector is reported so callers can inspect how uneven coverage is.
pub fn verify_band_constraints(bands: &[Band], global: Band) -> BandConstraintReport {
    let bins: Vec<u32> = (global.low_hz()..global.high_hz()).collect();
    let mut coverage_counts = vec![0u32; bins.len()];
    for band in bands {
        for (i, &bin) in bins.iter().enumerate() {
            if band.contains_bin(bin) {
                coverage_counts[i] += 1;
            }
        }
    }
    let min_coverage = coverage_counts.iter().copied().min().unwrap_or(0);
    let max_coverage = coverage_counts.iter().copied().max().unwrap_or(0);
    BandConstraintReport {
        cover_ok: !bands.is_empty() && min_coverage >= 1,
        length_ok: bands.iter().all(|b| (5..=35).contains(&b.width())),
        overlap_ok: !bands.is_empty() && min_coverage >= 2,
        coverage_counts,
        min_coverage,
        max_coverage,
    }
}

/// Number of subsets of `n` channels with at least `min_size` members.
pub fn subset_count(n_channels: usize, min_size: usize) -> u64 {
    let mut total = 0u64;
    for k in min_size..=n_channels {
        let mut c = 1u64;
        for i in 0..k {
            c = c * (n_channels - i) as u64 / (i + 1) as u64;
        }
        total += c;
    }
    total
}

fn check_subset_args(n_channels: usize, min_size: usize) -> Result<()> {
    if n_channels == 0 || min_size == 0 || min_size > n_channels {
        return Err(Error::InvalidConfig(format!(
            "need 1 <= min_size <= n_channels, got min_size {min_size}, n_channels {n_channels}"
        )));
    }
    Ok(())
}

/// All channel subsets with `>= min_size` members, ascending by mask value.
/// Refuses more than [`ENUMERATION_LIMIT`] channels.
pub fn enumerate_channel_subsets(n_channels: usize, min_size: usize) -> Result<Vec<ChannelSet>> {
    check_subset_args(n_channels, min_size)?;
    if n_channels > ENUMERATION_LIMIT {
        return Err(Error::UniverseTooLarge { n_channels, limit: ENUMERATION_LIMIT });
    }
    let mut out = Vec::with_capacity(subset_count(n_channels, min_size) as usize);
    for bits in 1u32..(1u32 << n_channels) {
        if bits.count_ones() as usize >= min_size {
            out.push(ChannelSet::with_min_channels(bits, n_channels, min_size)?);
        }
    }
    Ok(out)
}

/// `q` distinct subsets drawn uniformly without replacement, always including
/// the full-channel mask, returned in canonical (ascending mask) order. If `q`
/// covers the whole universe the enumeration is returned instead.
pub fn sample_channel_subsets(
    n_channels: usize,
    min_size: usize,
    q: usize,
    rng_seed: u64,
) -> Result<Vec<ChannelSet>> {
    check_subset_args(n_channels, min_size)?;
    if q == 0 {
        return Err(Error::InvalidConfig("sample size q must be >= 1".into()));
    }
    let total = if n_channels <= ENUMERATION_LIMIT {
        subset_count(n_channels, min_size)
    } else {
        u64::MAX
    };
    if n_channels <= ENUMERATION_LIMIT && q as u64 >= total {
        return enumerate_channel_subsets(n_channels, min_size);
    }
    let full_bits = if n_channels >= 32 { u32::MAX } else { (1u32 << n_channels) - 1 };
    let mut rng = seed::rng(rng_seed, Domain::UniverseSample, &[n_channels as u64]);
    let mut bits: Vec<u32> = if n_channels <= ENUMERATION_LIMIT {
        let pool: Vec<u32> = (1u32..(1u32 << n_channels))
            .filter(|b| b.count_ones() as usize >= min_size && *b != full_bits)
            .collect();
        seed::sample_indices(pool.len(), q - 1, &mut rng)
            .into_iter()
            .map(|i| pool[i])
            .collect()
    } else {
        // Rejection sampling for wide layouts that cannot be enumerated.
        use rand::Rng;
        let mut seen = std::collections::BTreeSet::new();
        let span = if n_channels >= 32 { u64::from(u32::MAX) + 1 } else { 1u64 << n_channels };
        while seen.len() < q - 1 {
            let b = rng.gen_range(1..span) as u32;
            if b.count_ones() as usize >= min_size && b != full_bits {
                seen.insert(b);
            }
        }
        seen.into_iter().collect()
    };
    bits.push(full_bits);
    bits.sort_unstable();
    bits.into_iter()
        .map(|b| ChannelSet::with_min_channels(b, n_channels, min_size))
        .collect()
}

/// How a universe is constructed for a given mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UniverseConfig {
    /// Minimum channels per spatial subset.
    pub min_channels: usize,
    /// Sub-band generator for FB / SFB.
    pub band_spec: BandUniverseSpec,
    /// SB: cap on sampled subsets (`None` = exhaustive enumeration).
    pub max_channel_subsets: Option<usize>,
    /// SFB: number of (subset, band) pairs sampled from the Cartesian product.
    pub sfb_pairs: usize,
    pub rng_seed: u64,
}

impl Default for UniverseConfig {
    fn default() -> Self {
        Self {
            min_channels: DEFAULT_MIN_CHANNELS,
            band_spec: BandUniverseSpec::default(),
            max_channel_subsets: None,
            sfb_pairs: 256,
            rng_seed: 0,
        }
    }
}

/// Builds the canonical precondition universe for a mode.
pub fn build_universe(
    mode: PreconditionMode,
    n_channels: usize,
    config: &UniverseConfig,
) -> Result<Vec<Precondition>> {
    let global = config.band_spec.global_band()?;
    let full = ChannelSet::full(n_channels)?;
    match mode {
        PreconditionMode::Plain => Ok(vec![Precondition::new(full, global, mode)?]),
        PreconditionMode::Sb => {
            let subsets = sb_subsets(n_channels, config)?;
            subsets
                .into_iter()
                .map(|s| Precondition::new(s, global, mode))
                .collect()
        }
        PreconditionMode::Fb => {
            let bands = generate_band_universe(&config.band_spec)?;
            bands
                .into_iter()
                .map(|b| Precondition::new(full, b, mode))
                .collect()
        }
        PreconditionMode::Sfb => {
            let subsets = sb_subsets(n_channels, config)?;
            let bands = generate_band_universe(&config.band_spec)?;
            sample_pairs(&subsets, &bands, config, full, global)
        }
    }
}

fn sb_subsets(n_channels: usize, config: &UniverseConfig) -> Result<Vec<ChannelSet>> {
    match config.max_channel_subsets {
        Some(q) => sample_channel_subsets(n_channels, config.min_channels, q, config.rng_seed),
        None => enumerate_channel_subsets(n_channels, config.min_channels),
    }
}

/// Uniform sample (without replacement) of `sfb_pairs` pairs from
/// subsets x bands, always including (full channels, global band).
fn sample_pairs(
    subsets: &[ChannelSet],
    bands: &[Band],
    config: &UniverseConfig,
    full: ChannelSet,
    global: Band,
) -> Result<Vec<Precondition>> {
    if config.sfb_pairs == 0 {
        return Err(Error::InvalidConfig("sfb_pairs must be >= 1".into()));
    }
    let nb = bands.len();
    let total = subsets.len() * nb;
    let anchor_s = subsets.iter().position(|s| *s == full);
    let anchor_b = bands.iter().position(|b| *b == global);
    let anchor = match (anchor_s, anchor_b) {
        (Some(si), Some(bi)) => si * nb + bi,
        _ => {
            return Err(Error::InvalidConfig(
                "SFB universe requires the full mask and global band to be available".into(),
            ))
        }
    };
    let mut flats: Vec<usize>;
    if config.sfb_pairs >= total {
        flats = (0..total).collect();
    } else {
        let mut rng = seed::rng(config.rng_seed, Domain::UniverseSample, &[total as u64]);
        // Sample q-1 from all indices except the anchor, then add the anchor.
        let picks = seed::sample_indices(total - 1, config.sfb_pairs - 1, &mut rng);
        flats = picks
            .into_iter()
            .map(|i| if i >= anchor { i + 1 } else { i })
            .collect();
        flats.push(anchor);
        flats.sort_unstable();
    }
    flats
        .into_iter()
        .map(|f| Precondition::new(subsets[f / nb], bands[f % nb], PreconditionMode::Sfb))
        .collect()
}
