//! Command-line front end for the spatial-spectral boosting library.
//!
//! Subcommands cover the whole experiment lifecycle: `generate` synthetic
//! sessions, dump the `bands` universe, `train` a single model,
//! `evaluate`/`predict` with it, export `importance` tables from a model
//! series, `inspect` a dataset, and `run` a full multi-session,
//! multi-mode experiment from a JSON config.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ssboost::analysis::ImportanceProfile;
use ssboost::boost::{evaluate, train_session};
use ssboost::csp::extract_bandpower_baseline;
use ssboost::experiment::{
    drift_summary, mode_label, predictions_csv, run_experiment, write_importance_csv,
    ExperimentConfig,
};
use ssboost::io::{load_model, read_eegb, save_model, save_trace, write_eegb};
use ssboost::precondition::{
    build_universe, generate_band_universe, verify_band_constraints, BandConstraintReport,
    BandUniverseSpec, UniverseConfig,
};
use ssboost::seed::{derive, Domain};
use ssboost::synth::{generate_session, DriftSchedule, PlantSpec};
use ssboost::types::{Band, BoostConfig, PreconditionMode, SessionDataset};
use ssboost::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ssboost",
    version,
    about = "Spatial-spectral precondition boosting for two-class EEG trials"
)]
struct Cli {
    /// Master seed; overrides seeds in config files when given.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = all cores). Thread count never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Print progress to stderr.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Plain,
    Sb,
    Fb,
    Sfb,
}

impl From<ModeArg> for PreconditionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Plain => PreconditionMode::Plain,
            ModeArg::Sb => PreconditionMode::Sb,
            ModeArg::Fb => PreconditionMode::Fb,
            ModeArg::Sfb => PreconditionMode::Sfb,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic sessions from a PlantSpec or DriftSchedule JSON.
    Generate {
        /// JSON file holding a PlantSpec or a DriftSchedule ("sessions" key).
        #[arg(long)]
        spec: PathBuf,
        /// Output EEGB path; schedules write one numbered file per session.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the sub-band universe and its constraint report as JSON.
    Bands {
        /// Optional BandUniverseSpec JSON; defaults to the built-in spec.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train one model on every trial of a session file.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// BoostConfig JSON; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// UniverseConfig JSON; defaults apply when omitted.
        #[arg(long)]
        universe: Option<PathBuf>,
        #[arg(long)]
        model_out: PathBuf,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Score a trained model on a session file (accuracy + confusion).
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-trial decision scores as CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Importance table and drift summary from session-ordered models.
    Importance {
        /// Model JSON files in session order.
        #[arg(long, required = true, num_args = 1..)]
        models: Vec<PathBuf>,
        /// Accumulate |alpha| instead of signed alpha.
        #[arg(long)]
        abs: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Dataset header plus per-channel band-power summaries.
    Inspect {
        #[arg(long)]
        input: PathBuf,
    },
    /// Full experiment from an ExperimentConfig JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

/// Writes to stdout, treating a closed pipe (e.g. `ssboost bands | head`)
/// as a clean exit rather than a panic.
fn print_out(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(Error::Io(e)),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            Ok(())
        }
        None => print_out(text),
    }
}

/// `sessions.eegb` -> `sessions_03.eegb` for the fourth session.
fn numbered_path(out: &Path, index: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|s| s.to_string_lossy().into_owned());
    let name = match ext {
        Some(ext) => format!("{stem}_{index:02}.{ext}"),
        None => format!("{stem}_{index:02}"),
    };
    out.with_file_name(name)
}

fn cmd_generate(spec_path: &Path, out: &Path, seed: Option<u64>, verbose: bool) -> Result<()> {
    let value: serde_json::Value = read_json_file(spec_path)?;
    let is_schedule = value.get("sessions").is_some();
    if is_schedule {
        let mut schedule: DriftSchedule = serde_json::from_value(value)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", spec_path.display())))?;
        if let Some(seed) = seed {
            for (t, s) in schedule.sessions.iter_mut().enumerate() {
                s.seed = seed + t as u64;
            }
        }
        let sessions = schedule.generate_all()?;
        let many = sessions.len() > 1;
        for (t, session) in sessions.iter().enumerate() {
            let path = if many { numbered_path(out, t) } else { out.to_path_buf() };
            write_eegb(session, &path)?;
            if verbose {
                eprintln!("session {t}: {} trials -> {}", session.n_trials(), path.display());
            }
            print_out(&format!("{}\n", path.display()))?;
        }
    } else {
        let mut spec: PlantSpec = serde_json::from_value(value)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", spec_path.display())))?;
        if let Some(seed) = seed {
            spec.seed = seed;
        }
        let session = generate_session(&spec)?;
        write_eegb(&session, out)?;
        if verbose {
            eprintln!("{} trials -> {}", session.n_trials(), out.display());
        }
        print_out(&format!("{}\n", out.display()))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BandsOutput {
    bands: Vec<Band>,
    count: usize,
    report: BandConstraintReport,
}

fn cmd_bands(spec: Option<&PathBuf>, out: Option<&PathBuf>) -> Result<()> {
    let spec: BandUniverseSpec = match spec {
        Some(path) => read_json_file(path)?,
        None => BandUniverseSpec::default(),
    };
    let bands = generate_band_universe(&spec)?;
    let report = verify_band_constraints(&bands, Band::global());
    let output = BandsOutput { count: bands.len(), bands, report };
    emit(&(serde_json::to_string_pretty(&output)? + "\n"), out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    input: &Path,
    mode: PreconditionMode,
    config: Option<&PathBuf>,
    universe: Option<&PathBuf>,
    model_out: &Path,
    trace_out: Option<&PathBuf>,
    seed: Option<u64>,
    verbose: bool,
) -> Result<()> {
    let dataset = read_eegb(input)?;
    let mut boost: BoostConfig = match config {
        Some(path) => read_json_file(path)?,
        None => BoostConfig::default(),
    };
    let mut u_cfg: UniverseConfig = match universe {
        Some(path) => read_json_file(path)?,
        None => UniverseConfig::default(),
    };
    if let Some(seed) = seed {
        boost.rng_seed = seed;
        u_cfg.rng_seed = derive(seed, Domain::Mode, &[mode as u64]);
    }
    let universe = build_universe(mode, dataset.n_channels(), &u_cfg)?;
    if verbose {
        eprintln!(
            "training mode {} on {} trials with {} candidate preconditions",
            mode_label(mode),
            dataset.n_trials(),
            universe.len()
        );
    }
    let (model, trace) = train_session(&dataset, &universe, &boost)?;
    save_model(&model, model_out)?;
    if let Some(path) = trace_out {
        save_trace(&trace, path)?;
    }
    if verbose {
        eprintln!(
            "kept {} of {} terms -> {}",
            model.selected_k,
            model.terms.len(),
            model_out.display()
        );
    }
    print_out(&format!("{}\n", model_out.display()))?;
    Ok(())
}

fn cmd_evaluate(model: &Path, input: &Path, out: Option<&PathBuf>) -> Result<()> {
    let model = load_model(model)?;
    let dataset = read_eegb(input)?;
    let report = evaluate(&model, &dataset)?;
    emit(&(serde_json::to_string_pretty(&report)? + "\n"), out)
}

fn cmd_predict(model: &Path, input: &Path, out: Option<&PathBuf>) -> Result<()> {
    let model = load_model(model)?;
    let dataset = read_eegb(input)?;
    emit(&predictions_csv(&model, &dataset)?, out)
}

fn cmd_importance(
    models: &[PathBuf],
    use_abs: bool,
    csv: Option<&PathBuf>,
    json: Option<&PathBuf>,
) -> Result<()> {
    if csv.is_none() && json.is_none() {
        return Err(Error::InvalidConfig(
            "nothing to write: pass --csv and/or --json".into(),
        ));
    }
    let mut profiles = Vec::with_capacity(models.len());
    let mut channel_names: Vec<String> = Vec::new();
    let mut mode = PreconditionMode::Plain;
    for (t, path) in models.iter().enumerate() {
        let model = load_model(path)?;
        if t == 0 {
            channel_names = model.channel_names.clone();
            mode = model.mode;
        } else if model.channel_names.len() != channel_names.len() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} has {} channels, first model has {}",
                    path.display(),
                    model.channel_names.len(),
                    channel_names.len()
                ),
            });
        }
        profiles.push(ImportanceProfile::from_model(&model, t, use_abs));
    }
    if let Some(path) = csv {
        write_importance_csv(&profiles, &channel_names, path)?;
    }
    if let Some(path) = json {
        let summary = drift_summary(mode, &profiles)?;
        fs::write(path, serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BandPowerSummary {
    band: Band,
    /// Mean log band power per channel over all trials.
    mean_log_power: Vec<f64>,
    /// Positive-class mean minus negative-class mean, per channel.
    class_difference: Vec<f64>,
}

#[derive(Serialize)]
struct InspectOutput {
    n_trials: usize,
    n_samples: usize,
    n_channels: usize,
    sample_rate_hz: f64,
    channel_names: Vec<String>,
    positive_trials: usize,
    negative_trials: usize,
    band_power: Vec<BandPowerSummary>,
}

fn cmd_inspect(input: &Path) -> Result<()> {
    let dataset = read_eegb(input)?;
    let bands = vec![Band::new(8, 13)?, Band::new(13, 30)?, Band::global()];
    let summaries = summarize_band_power(&dataset, &bands)?;
    let labels = dataset.labels();
    let output = InspectOutput {
        n_trials: dataset.n_trials(),
        n_samples: dataset.n_samples(),
        n_channels: dataset.n_channels(),
        sample_rate_hz: dataset.sample_rate_hz,
        channel_names: dataset.channel_names.clone(),
        positive_trials: labels.iter().filter(|&&l| l == 1).count(),
        negative_trials: labels.iter().filter(|&&l| l == -1).count(),
        band_power: summaries,
    };
    print_out(&(serde_json::to_string_pretty(&output)? + "\n"))?;
    Ok(())
}

fn summarize_band_power(
    dataset: &SessionDataset,
    bands: &[Band],
) -> Result<Vec<BandPowerSummary>> {
    let n_channels = dataset.n_channels();
    let mut sums = vec![0.0f64; bands.len() * n_channels];
    let mut pos_sums = vec![0.0f64; bands.len() * n_channels];
    let mut neg_sums = vec![0.0f64; bands.len() * n_channels];
    let mut n_pos = 0usize;
    let mut n_neg = 0usize;
    for trial in &dataset.trials {
        let powers = extract_bandpower_baseline(trial, bands, dataset.sample_rate_hz)?;
        for (i, p) in powers.iter().enumerate() {
            sums[i] += p;
        }
        if trial.label() == 1 {
            n_pos += 1;
            for (i, p) in powers.iter().enumerate() {
                pos_sums[i] += p;
            }
        } else {
            n_neg += 1;
            for (i, p) in powers.iter().enumerate() {
                neg_sums[i] += p;
            }
        }
    }
    let n = dataset.n_trials() as f64;
    Ok(bands
        .iter()
        .enumerate()
        .map(|(b, &band)| {
            let row = |v: &[f64], denom: f64| -> Vec<f64> {
                (0..n_channels)
                    .map(|c| if denom > 0.0 { v[b * n_channels + c] / denom } else { 0.0 })
                    .collect()
            };
            let mean = row(&sums, n);
            let pos = row(&pos_sums, n_pos as f64);
            let neg = row(&neg_sums, n_neg as f64);
            let class_difference = pos.iter().zip(&neg).map(|(p, q)| p - q).collect();
            BandPowerSummary { band, mean_log_power: mean, class_difference }
        })
        .collect())
}

fn cmd_run(config_path: &Path, seed: Option<u64>, verbose: bool) -> Result<()> {
    let mut config: ExperimentConfig = read_json_file(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if verbose {
        eprintln!(
            "running {} mode(s) into {}",
            config.modes.len(),
            config.out_dir.display()
        );
    }
    let artifacts = run_experiment(&config)?;
    print_out(&fs::read_to_string(&artifacts.accuracy_csv)?)?;
    if verbose {
        eprintln!("artifacts in {}", artifacts.out_dir.display());
    }
    Ok(())
}

fn real_main(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Generate { spec, out } => cmd_generate(spec, out, cli.seed, cli.verbose),
        Command::Bands { spec, out } => cmd_bands(spec.as_ref(), out.as_ref()),
        Command::Train { input, mode, config, universe, model_out, trace_out } => cmd_train(
            input,
            (*mode).into(),
            config.as_ref(),
            universe.as_ref(),
            model_out,
            trace_out.as_ref(),
            cli.seed,
            cli.verbose,
        ),
        Command::Evaluate { model, input, out } => cmd_evaluate(model, input, out.as_ref()),
        Command::Predict { model, input, out } => cmd_predict(model, input, out.as_ref()),
        Command::Importance { models, abs, csv, json } => {
            cmd_importance(models, *abs, csv.as_ref(), json.as_ref())
        }
        Command::Inspect { input } => cmd_inspect(input),
        Command::Run { config } => cmd_run(config, cli.seed, cli.verbose),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: failed to size thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
