//! Bit-exact trial-archive format (EEGB) and JSON persistence for models and
//! traces.
//!
//! EEGB layout, all integers little-endian:
//!
//! ```text
//! magic   4 bytes  "EEGB"
//! version u32      1
//! n_trials, n_samples, n_channels   u32 each, all > 0
//! sample_rate  f32
//! channel names  n_channels x (u32 length + UTF-8 bytes)
//! labels  n_trials x i8, each -1 or +1
//! samples f32 x (n_trials * n_samples * n_channels),
//!         trial-major, then time-major, then channel
//! ```
//!
//! Samples are stored at 32-bit precision; models keep 64-bit internally.
//! The session index is not part of the format — readers start at 0.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::boost::BoostTrace;
use crate::error::{Error, Result};
use crate::model::AdditiveModel;
use crate::types::{validate_dataset, DatasetIssue, SessionDataset, TrialMatrix};

const MAGIC: &[u8; 4] = b"EEGB";
pub const EEGB_VERSION: u32 = 1;

fn open_file(path: &Path) -> Result<File> {
    File::open(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create_file(path: &Path) -> Result<File> {
    File::create(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Exact on-disk size in bytes of a dataset with these dimensions and names.
pub fn eegb_file_size(
    n_trials: usize,
    n_samples: usize,
    n_channels: usize,
    channel_names: &[String],
) -> usize {
    let names: usize = channel_names.iter().map(|n| 4 + n.len()).sum();
    4 + 4 + 3 * 4 + 4 + names + n_trials + 4 * n_trials * n_samples * n_channels
}

/// Serializes a dataset; byte-deterministic for a given dataset.
pub fn write_eegb(dataset: &SessionDataset, path: &Path) -> Result<()> {
    if dataset.trials.is_empty() {
        return Err(Error::EmptyDataset);
    }
    // Single-class datasets are storable (train-time code has its own check).
    let issues: Vec<String> = validate_dataset(dataset)
        .into_iter()
        .filter(|i| !matches!(i, DatasetIssue::SingleClassDataset { .. }))
        .map(|i| i.to_string())
        .collect();
    if !issues.is_empty() {
        return Err(Error::InvalidDataset(issues.join("; ")));
    }
    let n_trials = dataset.n_trials();
    let n_samples = dataset.n_samples();
    let n_channels = dataset.n_channels();
    let mut w = BufWriter::new(create_file(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&EEGB_VERSION.to_le_bytes())?;
    w.write_all(&(n_trials as u32).to_le_bytes())?;
    w.write_all(&(n_samples as u32).to_le_bytes())?;
    w.write_all(&(n_channels as u32).to_le_bytes())?;
    w.write_all(&(dataset.sample_rate_hz as f32).to_le_bytes())?;
    for name in &dataset.channel_names {
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name.as_bytes())?;
    }
    for trial in &dataset.trials {
        w.write_all(&[trial.label() as u8])?;
    }
    for trial in &dataset.trials {
        for t in 0..n_samples {
            for c in 0..n_channels {
                w.write_all(&(trial.samples()[[t, c]] as f32).to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_exact_or(r: &mut impl Read, buf: &mut [u8], context: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::LengthMismatch { context: format!("file ended inside {context}") }
        } else {
            Error::Io(e)
        }
    })
}

fn read_u32(r: &mut impl Read, context: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact_or(r, &mut b, context)?;
    Ok(u32::from_le_bytes(b))
}

/// Deserializes an EEGB file; the inverse of [`write_eegb`] at 32-bit sample
/// precision. The session index of the result is 0.
pub fn read_eegb(path: &Path) -> Result<SessionDataset> {
    let mut r = BufReader::new(open_file(path)?);
    let mut magic = [0u8; 4];
    read_exact_or(&mut r, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(Error::NotEegb { reason: format!("bad magic {:?}", magic) });
    }
    let version = read_u32(&mut r, "version")?;
    if version != EEGB_VERSION {
        return Err(Error::NotEegb { reason: format!("unsupported version {version}") });
    }
    let n_trials = read_u32(&mut r, "trial count")? as usize;
    let n_samples = read_u32(&mut r, "sample count")? as usize;
    let n_channels = read_u32(&mut r, "channel count")? as usize;
    if n_trials == 0 || n_samples == 0 || n_channels == 0 {
        return Err(Error::NotEegb {
            reason: format!(
                "zero-sized header ({n_trials} trials, {n_samples} samples, {n_channels} channels)"
            ),
        });
    }
    let mut rate = [0u8; 4];
    read_exact_or(&mut r, &mut rate, "sample rate")?;
    let sample_rate_hz = f64::from(f32::from_le_bytes(rate));

    let mut channel_names = Vec::with_capacity(n_channels);
    for i in 0..n_channels {
        let len = read_u32(&mut r, "channel name length")? as usize;
        let mut name = vec![0u8; len];
        read_exact_or(&mut r, &mut name, "channel name")?;
        let name = String::from_utf8(name).map_err(|_| Error::NotEegb {
            reason: format!("channel name {i} is not UTF-8"),
        })?;
        channel_names.push(name);
    }

    let mut labels = vec![0u8; n_trials];
    read_exact_or(&mut r, &mut labels, "labels")?;
    let labels: Vec<i8> = labels
        .into_iter()
        .map(|b| {
            let v = b as i8;
            if v == 1 || v == -1 {
                Ok(v)
            } else {
                Err(Error::InvalidLabel { value: i32::from(v) })
            }
        })
        .collect::<Result<Vec<i8>>>()?;

    let mut payload = vec![0u8; 4 * n_trials * n_samples * n_channels];
    read_exact_or(&mut r, &mut payload, "sample payload")?;
    let mut trailing = [0u8; 1];
    match r.read(&mut trailing)? {
        0 => {}
        _ => {
            return Err(Error::LengthMismatch {
                context: "trailing bytes after sample payload".into(),
            })
        }
    }

    let mut trials = Vec::with_capacity(n_trials);
    let trial_bytes = 4 * n_samples * n_channels;
    for (i, chunk) in payload.chunks_exact(trial_bytes).enumerate() {
        let mut samples = Array2::zeros((n_samples, n_channels));
        for t in 0..n_samples {
            for c in 0..n_channels {
                let off = 4 * (t * n_channels + c);
                let v = f32::from_le_bytes(chunk[off..off + 4].try_into().expect("4 bytes"));
                samples[[t, c]] = f64::from(v);
            }
        }
        trials.push(TrialMatrix::new(samples, labels[i])?);
    }
    Ok(SessionDataset::new(trials, sample_rate_hz, channel_names, 0))
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(create_file(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let r = BufReader::new(open_file(path)?);
    Ok(serde_json::from_reader(r)?)
}

/// Writes a trained model as versioned JSON.
pub fn save_model(model: &AdditiveModel, path: &Path) -> Result<()> {
    model.validate()?;
    write_json(model, path)
}

/// Loads and structurally validates a model file.
pub fn load_model(path: &Path) -> Result<AdditiveModel> {
    let model: AdditiveModel = read_json(path)?;
    model.validate()?;
    Ok(model)
}

pub fn save_trace(trace: &BoostTrace, path: &Path) -> Result<()> {
    write_json(trace, path)
}

pub fn load_trace(path: &Path) -> Result<BoostTrace> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tmp(name: &str) -> tempfile::TempPath {
        tempfile::Builder::new()
            .prefix(name)
            .suffix(".eegb")
            .tempfile()
            .unwrap()
            .into_temp_path()
    }

    fn tiny_dataset() -> SessionDataset {
        let t1 = TrialMatrix::new(
            Array2::from_shape_vec((3, 2), vec![0.5, -1.25, 2.0, 0.0, -0.75, 3.5]).unwrap(),
            1,
        )
        .unwrap();
        let t2 = TrialMatrix::new(
            Array2::from_shape_vec((3, 2), vec![1.0, 1.5, -2.5, 0.25, 0.125, -4.0]).unwrap(),
            -1,
        )
        .unwrap();
        SessionDataset::new(vec![t1, t2], 128.0, vec!["C3".into(), "C4".into()], 0)
    }

    #[test]
    fn round_trip_is_exact_for_f32_values() {
        let ds = tiny_dataset();
        let path = tmp("roundtrip");
        write_eegb(&ds, &path).unwrap();
        let back = read_eegb(&path).unwrap();
        assert_eq!(back.n_trials(), 2);
        assert_eq!(back.channel_names, ds.channel_names);
        assert_eq!(back.sample_rate_hz, 128.0);
        assert_eq!(back.labels(), ds.labels());
        assert_eq!(back.session_index, 0);
        for (a, b) in back.trials.iter().zip(&ds.trials) {
            assert_eq!(a.samples(), b.samples(), "f32-exact values must round-trip");
        }
    }

    #[test]
    fn file_size_matches_layout_arithmetic() {
        let ds = tiny_dataset();
        let path = tmp("size");
        write_eegb(&ds, &path).unwrap();
        let meta = std::fs::metadata(&path).unwrap();
        let expected = eegb_file_size(2, 3, 2, &ds.channel_names);
        assert_eq!(meta.len() as usize, expected);
        // 4 + 4 + 12 + 4 + (4+2)+(4+2) + 2 + 4*2*3*2 = 86
        assert_eq!(expected, 86);
    }

    #[test]
    fn write_is_byte_deterministic() {
        let ds = tiny_dataset();
        let p1 = tmp("det1");
        let p2 = tmp("det2");
        write_eegb(&ds, &p1).unwrap();
        write_eegb(&ds, &p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let ds = SessionDataset::new(vec![], 128.0, vec![], 0);
        let err = write_eegb(&ds, &tmp("empty")).unwrap_err();
        assert_eq!(err.to_string(), "empty dataset");
    }

    #[test]
    fn bad_magic_is_rejected() {
        let path = tmp("magic");
        let ds = tiny_dataset();
        write_eegb(&ds, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        let err = read_eegb(&path).unwrap_err();
        assert!(err.to_string().starts_with("not an EEGB file"));
    }

    #[test]
    fn unsupported_version_is_rejected() {
        let path = tmp("version");
        write_eegb(&tiny_dataset(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 9;
        std::fs::write(&path, &bytes).unwrap();
        let err = read_eegb(&path).unwrap_err();
        assert!(err.to_string().contains("unsupported version"));
    }

    #[test]
    fn truncated_payload_is_length_mismatch() {
        let path = tmp("trunc");
        write_eegb(&tiny_dataset(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        let err = read_eegb(&path).unwrap_err();
        assert!(err.to_string().starts_with("length mismatch"), "{err}");
    }

    #[test]
    fn oversized_header_is_length_mismatch() {
        let path = tmp("over");
        write_eegb(&tiny_dataset(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // Claim 4 samples per trial while the payload holds 3.
        bytes[12..16].copy_from_slice(&4u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        let err = read_eegb(&path).unwrap_err();
        assert!(err.to_string().starts_with("length mismatch"), "{err}");
    }

    #[test]
    fn trailing_garbage_is_length_mismatch() {
        let path = tmp("trail");
        write_eegb(&tiny_dataset(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.push(0);
        std::fs::write(&path, &bytes).unwrap();
        let err = read_eegb(&path).unwrap_err();
        assert!(err.to_string().contains("trailing"), "{err}");
    }

    #[test]
    fn invalid_label_is_rejected() {
        let path = tmp("label");
        write_eegb(&tiny_dataset(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // Labels sit right after the name table: offset 24 + 6 + 6 = 36.
        bytes[36] = 3;
        std::fs::write(&path, &bytes).unwrap();
        let err = read_eegb(&path).unwrap_err();
        assert_eq!(err.to_string(), "invalid label: 3");
    }

    #[test]
    fn zero_count_header_is_rejected() {
        let path = tmp("zero");
        write_eegb(&tiny_dataset(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[12..16].copy_from_slice(&0u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        assert!(read_eegb(&path).unwrap_err().to_string().contains("zero-sized"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn random_datasets_round_trip(
            n_trials in 1usize..5,
            n_samples in 2usize..12,
            n_channels in 1usize..4,
            rate in 1.0f32..512.0,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let names: Vec<String> = (0..n_channels).map(|c| format!("ch{c}")).collect();
            let trials: Vec<TrialMatrix> = (0..n_trials).map(|i| {
                let vals: Vec<f64> = (0..n_samples * n_channels)
                    .map(|_| f64::from(rng.gen_range(-1000.0f32..1000.0)))
                    .collect();
                let m = Array2::from_shape_vec((n_samples, n_channels), vals).unwrap();
                TrialMatrix::new(m, if i % 2 == 0 { 1 } else { -1 }).unwrap()
            }).collect();
            let ds = SessionDataset::new(trials, f64::from(rate), names, 3);
            let path = tmp("prop");
            write_eegb(&ds, &path).unwrap();
            let back = read_eegb(&path).unwrap();
            prop_assert_eq!(back.n_trials(), ds.n_trials());
            prop_assert_eq!(back.labels(), ds.labels());
            prop_assert_eq!(back.channel_names.clone(), ds.channel_names.clone());
            prop_assert_eq!(back.sample_rate_hz, f64::from(rate));
            prop_assert_eq!(back.session_index, 0, "session index is not persisted");
            for (a, b) in back.trials.iter().zip(&ds.trials) {
                prop_assert_eq!(a.samples(), b.samples());
            }
        }
    }

    #[test]
    fn model_and_trace_files_round_trip() {
        use crate::precondition::{build_universe, UniverseConfig};
        use crate::types::{BoostConfig, PreconditionMode};
        // Reuse the generator for a small real model.
        let spec = crate::synth::PlantSpec {
            planted_channels: crate::types::ChannelSet::with_min_channels(0b11, 4, 1).unwrap(),
            planted_band: crate::types::Band::new(25, 35).unwrap(),
            snr: 8.0,
            n_trials: 16,
            n_samples: 128,
            sample_rate_hz: 96.0,
            seed: 4,
        };
        let ds = crate::synth::generate_session(&spec).unwrap();
        let universe =
            build_universe(PreconditionMode::Plain, 4, &UniverseConfig::default()).unwrap();
        let cfg = BoostConfig {
            k_max: 2,
            csp_dim: 2,
            validation_fraction: 0.0,
            ..BoostConfig::default()
        };
        let (model, trace) = crate::boost::train_session(&ds, &universe, &cfg).unwrap();
        let mp = tmp("model");
        let tp = tmp("trace");
        save_model(&model, &mp).unwrap();
        save_trace(&trace, &tp).unwrap();
        let model_back = load_model(&mp).unwrap();
        let trace_back = load_trace(&tp).unwrap();
        assert_eq!(model_back, model);
        assert_eq!(trace_back, trace);
        // Decision values survive the float round trip bit-exactly.
        assert_eq!(
            model_back.decision_values(&ds).unwrap(),
            model.decision_values(&ds).unwrap()
        );
    }
}
