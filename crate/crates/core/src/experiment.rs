//! Experiment orchestration shared by the CLI: session intake, ordered
//! train/test splits, multi-mode training, and deterministic CSV/JSON
//! exports.
//!
//! A run takes a list of recorded sessions (EEGB files) or a synthetic
//! drift schedule, trains every requested precondition mode on each
//! session's leading 7/8 of trials, scores the trailing 1/8, and writes
//! models, traces, an accuracy table, per-mode importance tables, and
//! per-mode drift summaries. All outputs are byte-deterministic for a
//! given config and seed, regardless of thread count. Outputs are staged
//! in a scratch directory and promoted only on success, so a failed run
//! leaves no partial artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{spearman_vs_order, temporal_differences, ImportanceProfile, Target, TemporalSeries};
use crate::boost::{evaluate, train_session, BoostTrace, EvalReport};
use crate::error::{Error, Result};
use crate::io::{read_eegb, save_model, save_trace};
use crate::model::AdditiveModel;
use crate::precondition::{build_universe, UniverseConfig};
use crate::seed::{derive, Domain};
use crate::synth::DriftSchedule;
use crate::types::{BoostConfig, PreconditionMode, SessionDataset};

/// Fraction of trials held out for testing: the trailing eighth, at least
/// one trial, mirroring a train-on-first-sessions / test-on-last protocol
/// applied within each session.
pub const TEST_DENOMINATOR: usize = 8;

pub fn mode_label(mode: PreconditionMode) -> &'static str {
    match mode {
        PreconditionMode::Plain => "plain",
        PreconditionMode::Sb => "sb",
        PreconditionMode::Fb => "fb",
        PreconditionMode::Sfb => "sfb",
    }
}

fn mode_id(mode: PreconditionMode) -> u64 {
    mode as u64
}

/// Where the sessions of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SessionSource {
    /// EEGB files in session order.
    Files(Vec<PathBuf>),
    /// A synthetic drift schedule generated in-process.
    Schedule(DriftSchedule),
}

/// Full description of an experiment run, loaded from a JSON file by the
/// CLI `run` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sessions: SessionSource,
    pub modes: Vec<PreconditionMode>,
    #[serde(default)]
    pub boost: BoostConfig,
    #[serde(default)]
    pub universe: UniverseConfig,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Use |alpha| instead of signed alpha when accumulating importance.
    #[serde(default)]
    pub abs_importance: bool,
}

/// One mode's result on one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeResult {
    pub mode: PreconditionMode,
    pub accuracy: f64,
    pub n_correct: usize,
    pub selected_k: usize,
    pub n_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub session_index: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub results: Vec<ModeResult>,
}

/// Machine-readable record of a whole run, also written as
/// `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub modes: Vec<PreconditionMode>,
    pub n_sessions: usize,
    pub sessions: Vec<SessionResult>,
}

/// Cross-session movement of importance for one mode: the inputs for a
/// drift plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSummary {
    pub mode: PreconditionMode,
    pub session_indices: Vec<usize>,
    pub band_com_hz: Vec<Option<f64>>,
    /// Spearman correlation of band center-of-mass against session order;
    /// `None` when fewer than two sessions or any center-of-mass is
    /// undefined.
    pub band_com_spearman: Option<f64>,
    pub band_com_constant: Option<bool>,
    pub channels: Vec<TemporalSeries>,
    pub band_bins: Vec<TemporalSeries>,
}

/// Splits one session into leading train and trailing test portions by
/// trial order. The test split is `n / 8` trials (at least one).
pub fn split_by_order(dataset: &SessionDataset) -> Result<(SessionDataset, SessionDataset)> {
    let n = dataset.n_trials();
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "session {} has {n} trial(s); need at least 2 to split",
            dataset.session_index
        )));
    }
    let n_test = (n / TEST_DENOMINATOR).max(1);
    let n_train = n - n_test;
    let train = SessionDataset::new(
        dataset.trials[..n_train].to_vec(),
        dataset.sample_rate_hz,
        dataset.channel_names.clone(),
        dataset.session_index,
    );
    let test = SessionDataset::new(
        dataset.trials[n_train..].to_vec(),
        dataset.sample_rate_hz,
        dataset.channel_names.clone(),
        dataset.session_index,
    );
    Ok((train, test))
}

/// Loads or generates the session list of a config, tagging each dataset
/// with its position as the session index.
pub fn resolve_sessions(source: &SessionSource) -> Result<Vec<SessionDataset>> {
    let sessions = match source {
        SessionSource::Files(paths) => {
            let mut out = Vec::with_capacity(paths.len());
            for (i, path) in paths.iter().enumerate() {
                out.push(read_eegb(path)?.with_session_index(i));
            }
            out
        }
        SessionSource::Schedule(schedule) => schedule.generate_all()?,
    };
    if sessions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n_channels = sessions[0].n_channels();
    for s in &sessions {
        if s.n_channels() != n_channels {
            return Err(Error::InvalidDataset(format!(
                "session {} has {} channels, session {} has {}",
                sessions[0].session_index,
                n_channels,
                s.session_index,
                s.n_channels()
            )));
        }
    }
    Ok(sessions)
}

fn csv_field(name: &str) -> String {
    if name.contains(',') || name.contains('"') || name.contains('\n') {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name.to_string()
    }
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the per-session importance table: one row per session with the
/// channel columns, the 35 unit-band columns, the normalized variance and
/// the band center-of-mass.
pub fn write_importance_csv(
    profiles: &[ImportanceProfile],
    channel_names: &[String],
    path: &Path,
) -> Result<()> {
    if profiles.is_empty() {
        return Err(Error::EmptyProfile { context: "no importance profiles to export".into() });
    }
    let mut out = String::from("session");
    for name in channel_names {
        out.push(',');
        out.push_str(&csv_field(name));
    }
    for bin in 0..crate::analysis::N_BAND_BINS {
        out.push_str(&format!(",hz{:02}", crate::types::GLOBAL_LOW_HZ as usize + bin));
    }
    out.push_str(",variance,band_com\n");
    for p in profiles {
        if p.channel_importance.len() != channel_names.len() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "profile for session {} has {} channels, header has {}",
                    p.session_index,
                    p.channel_importance.len(),
                    channel_names.len()
                ),
            });
        }
        out.push_str(&p.session_index.to_string());
        for v in &p.channel_importance {
            out.push(',');
            out.push_str(&v.to_string());
        }
        for v in &p.band_importance {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push(',');
        out.push_str(&opt_cell(p.channel_variance));
        out.push(',');
        out.push_str(&opt_cell(p.band_com_hz));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Condenses a session-ordered profile list into drift statistics for one
/// mode: per-channel and per-bin temporal series plus the center-of-mass
/// trajectory.
pub fn drift_summary(
    mode: PreconditionMode,
    profiles: &[ImportanceProfile],
) -> Result<DriftSummary> {
    if profiles.is_empty() {
        return Err(Error::EmptyProfile { context: "no importance profiles to summarize".into() });
    }
    let n_channels = profiles[0].channel_importance.len();
    let (channels, band_bins) = if profiles.len() >= 2 {
        let channel_targets: Vec<Target> = (0..n_channels).map(Target::Channel).collect();
        let bin_targets: Vec<Target> =
            (0..crate::analysis::N_BAND_BINS).map(Target::BandBin).collect();
        (
            temporal_differences(profiles, &channel_targets)?,
            temporal_differences(profiles, &bin_targets)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };
    let band_com_hz: Vec<Option<f64>> = profiles.iter().map(|p| p.band_com_hz).collect();
    let (band_com_spearman, band_com_constant) = if profiles.len() >= 2
        && band_com_hz.iter().all(|c| c.is_some())
    {
        let values: Vec<f64> = band_com_hz.iter().map(|c| c.unwrap()).collect();
        let (rho, constant) = spearman_vs_order(&values);
        (Some(rho), Some(constant))
    } else {
        (None, None)
    };
    Ok(DriftSummary {
        mode,
        session_indices: profiles.iter().map(|p| p.session_index).collect(),
        band_com_hz,
        band_com_spearman,
        band_com_constant,
        channels,
        band_bins,
    })
}

/// One row per trial: index, decision score, predicted label, true label.
pub fn predictions_csv(model: &AdditiveModel, dataset: &SessionDataset) -> Result<String> {
    let scores = model.decision_values(dataset)?;
    let mut out = String::from("trial,score,predicted,label\n");
    for (i, (score, trial)) in scores.iter().zip(&dataset.trials).enumerate() {
        let predicted: i8 = if *score >= 0.0 { 1 } else { -1 };
        out.push_str(&format!("{i},{score},{predicted},{}\n", trial.label()));
    }
    Ok(out)
}

pub fn write_predictions_csv(
    model: &AdditiveModel,
    dataset: &SessionDataset,
    path: &Path,
) -> Result<()> {
    fs::write(path, predictions_csv(model, dataset)?)?;
    Ok(())
}

/// Everything a finished run leaves on disk, plus the in-memory summary.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub accuracy_csv: PathBuf,
    pub summary_json: PathBuf,
    pub importance_csvs: Vec<PathBuf>,
    pub drift_jsons: Vec<PathBuf>,
    pub summary: RunSummary,
}

struct TrainedSessionMode {
    model: AdditiveModel,
    trace: BoostTrace,
    report: EvalReport,
}

fn train_one(
    session: &SessionDataset,
    mode: PreconditionMode,
    config: &ExperimentConfig,
    universe: &[crate::types::Precondition],
) -> Result<TrainedSessionMode> {
    let (train, test) = split_by_order(session)?;
    let mut boost = config.boost.clone();
    let session_seed = derive(config.seed, Domain::Session, &[session.session_index as u64]);
    boost.rng_seed = derive(session_seed, Domain::Mode, &[mode_id(mode)]);
    let (model, trace) = train_session(&train, universe, &boost)?;
    let report = evaluate(&model, &test)?;
    Ok(TrainedSessionMode { model, trace, report })
}

/// Runs a whole experiment into `config.out_dir`. On any error the staged
/// outputs are deleted and the error is returned; the output directory is
/// only touched on success.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts> {
    if config.modes.is_empty() {
        return Err(Error::InvalidConfig("no modes requested".into()));
    }
    for (i, m) in config.modes.iter().enumerate() {
        if config.modes[..i].contains(m) {
            return Err(Error::InvalidConfig(format!("duplicate mode {}", mode_label(*m))));
        }
    }
    let sessions = resolve_sessions(&config.sessions)?;
    let n_channels = sessions[0].n_channels();

    let stage_name = match config.out_dir.file_name() {
        Some(name) => format!("{}.staging", name.to_string_lossy()),
        None => {
            return Err(Error::InvalidConfig(format!(
                "output directory {} has no name component",
                config.out_dir.display()
            )))
        }
    };
    let stage = config.out_dir.with_file_name(stage_name);
    if stage.exists() {
        fs::remove_dir_all(&stage)?;
    }
    fs::create_dir_all(&stage)?;

    let result = run_into(config, &sessions, n_channels, &stage);
    match result {
        Ok(mut artifacts) => {
            fs::create_dir_all(&config.out_dir)?;
            for entry in fs::read_dir(&stage)? {
                let entry = entry?;
                let target = config.out_dir.join(entry.file_name());
                if target.exists() {
                    fs::remove_file(&target)?;
                }
                fs::rename(entry.path(), &target)?;
            }
            fs::remove_dir_all(&stage)?;
            artifacts.rebase(&stage, &config.out_dir);
            Ok(artifacts)
        }
        Err(e) => {
            let _ = fs::remove_dir_all(&stage);
            Err(e)
        }
    }
}

impl RunArtifacts {
    fn rebase(&mut self, from: &Path, to: &Path) {
        let swap = |p: &mut PathBuf| {
            if let Ok(rel) = p.strip_prefix(from) {
                *p = to.join(rel);
            }
        };
        swap(&mut self.accuracy_csv);
        swap(&mut self.summary_json);
        self.importance_csvs.iter_mut().for_each(swap);
        self.drift_jsons.iter_mut().for_each(swap);
        self.out_dir = to.to_path_buf();
    }
}

fn run_into(
    config: &ExperimentConfig,
    sessions: &[SessionDataset],
    n_channels: usize,
    stage: &Path,
) -> Result<RunArtifacts> {
    let mut session_results: Vec<SessionResult> = sessions
        .iter()
        .map(|s| {
            let n = s.n_trials();
            let n_test = (n / TEST_DENOMINATOR).max(1);
            SessionResult {
                session_index: s.session_index,
                n_train: n - n_test,
                n_test,
                results: Vec::new(),
            }
        })
        .collect();
    let mut importance_csvs = Vec::new();
    let mut drift_jsons = Vec::new();

    for &mode in &config.modes {
        let label = mode_label(mode);
        let mut u_cfg = config.universe.clone();
        u_cfg.rng_seed = derive(config.seed, Domain::Mode, &[mode_id(mode)]);
        let universe = build_universe(mode, n_channels, &u_cfg)?;

        let mut profiles = Vec::with_capacity(sessions.len());
        for (si, session) in sessions.iter().enumerate() {
            let trained = train_one(session, mode, config, &universe)?;
            let model_path = stage.join(format!("session_{:02}_{label}.model.json", session.session_index));
            let trace_path = stage.join(format!("session_{:02}_{label}.trace.json", session.session_index));
            save_model(&trained.model, &model_path)?;
            save_trace(&trained.trace, &trace_path)?;
            profiles.push(ImportanceProfile::from_model(
                &trained.model,
                session.session_index,
                config.abs_importance,
            ));
            session_results[si].results.push(ModeResult {
                mode,
                accuracy: trained.report.accuracy,
                n_correct: trained.report.n_correct,
                selected_k: trained.model.selected_k,
                n_terms: trained.model.terms.len(),
            });
        }

        let importance_path = stage.join(format!("importance_{label}.csv"));
        write_importance_csv(&profiles, &sessions[0].channel_names, &importance_path)?;
        importance_csvs.push(importance_path);

        let drift_path = stage.join(format!("drift_{label}.json"));
        let summary = drift_summary(mode, &profiles)?;
        let json = serde_json::to_string_pretty(&summary)?;
        fs::write(&drift_path, json + "\n")?;
        drift_jsons.push(drift_path);
    }

    let accuracy_csv = stage.join("accuracy.csv");
    let mut table = String::from("session");
    for &mode in &config.modes {
        table.push(',');
        table.push_str(mode_label(mode));
    }
    table.push('\n');
    for sr in &session_results {
        table.push_str(&sr.session_index.to_string());
        for r in &sr.results {
            table.push(',');
            table.push_str(&r.accuracy.to_string());
        }
        table.push('\n');
    }
    fs::write(&accuracy_csv, table)?;

    let summary = RunSummary {
        seed: config.seed,
        modes: config.modes.clone(),
        n_sessions: sessions.len(),
        sessions: session_results,
    };
    let summary_json = stage.join("summary.json");
    fs::write(&summary_json, serde_json::to_string_pretty(&summary)? + "\n")?;

    Ok(RunArtifacts {
        out_dir: stage.to_path_buf(),
        accuracy_csv,
        summary_json,
        importance_csvs,
        drift_jsons,
        summary,
    })
}
