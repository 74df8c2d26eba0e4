//! `chromaheat` — simulate water-heater usage scenarios, detect
//! discomfort/comfort events, calibrate and apply the x-L cluster
//! classifier, export plot data, and produce operating-strategy advice.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data error.

mod config;

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use chromaheat_core::advisor::advise_from_rates;
use chromaheat_core::chromatic::ChromaticSignature;
use chromaheat_core::classifier::{calibrate, classify, ClusterModel};
use chromaheat_core::detector::{detect, event_rate, EventKind, SECONDS_PER_WEEK};
use chromaheat_core::error::Error as CoreError;
use chromaheat_core::io::{
    load_events, load_model, load_trace_csv, save_jsonl, save_model, save_trace_csv, write_jsonl,
    write_map_csv, EventRecord, MapRow,
};
use chromaheat_core::sim::{simulate, ScenarioKind};

use config::RunConfig;

#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match &err {
            CoreError::Io(_)
            | CoreError::InvalidScript(_)
            | CoreError::InvalidEfficiency(_)
            | CoreError::NonPositiveWindow(_)
            | CoreError::NonPositivePeriod(_)
            | CoreError::BankCoverage { .. } => 1,
            _ => 2,
        };
        Self {
            message: err.to_string(),
            code,
        }
    }
}

#[derive(Parser)]
#[command(name = "chromaheat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<RunConfig, CliError> {
        match &self.config {
            Some(path) => RunConfig::load(path),
            None => Ok(RunConfig::default()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate scenario traces and ground-truth labels.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        /// Output directory for trace CSVs and label files.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Scan a trace CSV for events.
    Detect {
        #[command(flatten)]
        config: ConfigArg,
        /// Input trace CSV.
        #[arg(long)]
        trace: PathBuf,
        /// Output events file (JSON lines); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit per-class centroids from labeled event files.
    Calibrate {
        /// One or more events files (JSON lines).
        #[arg(long, num_args = 1.., required = true)]
        events: Vec<PathBuf>,
        /// Output model file (TOML).
        #[arg(long)]
        out: PathBuf,
    },
    /// Assign events to the nearest calibrated cluster.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        events: PathBuf,
        /// Output classified events (JSON lines); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export an x-L map CSV for plotting.
    ExportMap {
        #[arg(long, num_args = 1.., required = true)]
        events: Vec<PathBuf>,
        /// Optional model for the kind_predicted / margin columns.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fuse event rates with an efficiency figure into a recommendation.
    Advise {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, num_args = 1.., required = true)]
        events: Vec<PathBuf>,
        /// Observation horizon covered by the events files, in seconds.
        #[arg(long, default_value_t = SECONDS_PER_WEEK)]
        horizon: f64,
        /// Efficiency figure in [0, 1].
        #[arg(long, conflicts_with = "efficiency_file")]
        efficiency: Option<f64>,
        /// One-line file holding the efficiency figure.
        #[arg(long)]
        efficiency_file: Option<PathBuf>,
        /// Optional JSON output path for the structured recommendation.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version through this path too
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out, seed } => cmd_simulate(&config, &out, seed),
        Command::Detect { config, trace, out } => cmd_detect(&config, &trace, out.as_deref()),
        Command::Calibrate { events, out } => cmd_calibrate(&events, &out),
        Command::Classify { model, events, out } => cmd_classify(&model, &events, out.as_deref()),
        Command::ExportMap { events, model, out } => {
            cmd_export_map(&events, model.as_deref(), out.as_deref())
        }
        Command::Advise {
            config,
            events,
            horizon,
            efficiency,
            efficiency_file,
            out,
        } => cmd_advise(
            &config,
            &events,
            horizon,
            efficiency,
            efficiency_file.as_deref(),
            out.as_deref(),
        ),
    }
}

fn scenario_file_stem(index: usize, kind: ScenarioKind) -> String {
    let kind = format!("{kind:?}").to_lowercase();
    format!("{index:03}_{kind}")
}

/// Verifies the directory accepts new files before any output is written.
fn ensure_writable_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    let probe = dir.join(".chromaheat_write_probe");
    File::create(&probe)
        .map_err(|e| CliError::usage(format!("output dir {} not writable: {e}", dir.display())))?;
    let _ = std::fs::remove_file(&probe);
    Ok(())
}

fn cmd_simulate(config: &ConfigArg, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let cfg = config.load()?;
    if cfg.scenarios.is_empty() {
        return Err(CliError::usage(
            "config defines no [[scenarios]]; nothing to simulate",
        ));
    }
    let base_seed = seed.unwrap_or(cfg.seed);

    // simulate everything first so IO failures cannot leave partial runs
    let mut results = Vec::new();
    for (i, entry) in cfg.scenarios.iter().enumerate() {
        let script = entry.to_script(base_seed, i as u64);
        let (trace, labels) = simulate(&cfg.tank, &script)?;
        results.push((i, script.kind, trace, labels));
    }

    ensure_writable_dir(out)?;
    for (i, kind, trace, labels) in &results {
        let stem = scenario_file_stem(*i, *kind);
        save_trace_csv(trace, &out.join(format!("trace_{stem}.csv")))?;
        save_jsonl(labels, &out.join(format!("labels_{stem}.jsonl")))?;
    }
    Ok(())
}

fn write_or_stdout<F>(out: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match out {
        Some(path) => {
            let mut w = BufWriter::new(
                File::create(path)
                    .map_err(|e| CliError::usage(format!("cannot create {}: {e}", path.display())))?,
            );
            write(&mut w)?;
            w.flush().map_err(|e| CliError::usage(e.to_string()))
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            write(&mut w)
        }
    }
}

fn cmd_detect(config: &ConfigArg, trace_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = config.load()?;
    let bank = cfg.bank()?;
    let trace = load_trace_csv(trace_path)?;
    let detection = detect(&trace, &cfg.detector, &bank, &cfg.normalization)?;
    for d in &detection.dropped {
        eprintln!(
            "warning: dropped {} candidate at sample {}: {}",
            d.kind, d.trigger_index, d.reason
        );
    }
    let records: Vec<EventRecord> = detection
        .events
        .iter()
        .map(|ev| EventRecord::from_event(ev, trace.sample_period))
        .collect();
    write_or_stdout(out, |w| write_jsonl(&records, w).map_err(CliError::from))
}

/// The classifier needs only (x, L); the processor outputs are recovered
/// from the stored signature components.
fn signature_from_record(rec: &EventRecord) -> ChromaticSignature {
    let denom = (3.0 * rec.l).abs();
    ChromaticSignature {
        r_out: rec.x * denom,
        g_out: rec.y * denom,
        b_out: rec.z * denom,
        x: rec.x,
        y: rec.y,
        z: rec.z,
        l_index: rec.l,
    }
}

fn cmd_calibrate(events: &[PathBuf], out: &Path) -> Result<(), CliError> {
    let mut labeled = Vec::new();
    for path in events {
        for rec in load_events(path)? {
            labeled.push((signature_from_record(&rec), rec.kind));
        }
    }
    let model = calibrate(&labeled)?;
    save_model(&model, out)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct ClassifiedRecord {
    #[serde(flatten)]
    event: EventRecord,
    kind_predicted: EventKind,
    margin: f64,
}

fn cmd_classify(model_path: &Path, events: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let mut records = Vec::new();
    for rec in load_events(events)? {
        let (kind_predicted, margin) = classify(&signature_from_record(&rec), &model)?;
        records.push(ClassifiedRecord {
            event: rec,
            kind_predicted,
            margin,
        });
    }
    write_or_stdout(out, |w| write_jsonl(&records, w).map_err(CliError::from))
}

fn cmd_export_map(
    events: &[PathBuf],
    model_path: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let model: Option<ClusterModel> = model_path.map(load_model).transpose()?;
    let mut rows = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for path in events {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "events".into());
        for (i, rec) in load_events(path)?.into_iter().enumerate() {
            let mut event_id = format!("{stem}-{i}");
            let mut suffix = 2;
            while !seen.insert(event_id.clone()) {
                event_id = format!("{stem}-{i}__{suffix}");
                suffix += 1;
            }
            if suffix > 2 {
                eprintln!("warning: duplicate event id, suffixed as {event_id}");
            }
            let (kind_predicted, margin) = match &model {
                Some(m) => {
                    let (k, margin) = classify(&signature_from_record(&rec), m)?;
                    (Some(k), Some(margin))
                }
                None => (None, None),
            };
            rows.push(MapRow {
                event_id,
                kind_true: rec.kind,
                kind_predicted,
                x: rec.x,
                y: rec.y,
                z: rec.z,
                l: rec.l,
                margin,
            });
        }
    }
    write_or_stdout(out, |w| write_map_csv(&rows, w).map_err(CliError::from))
}

fn read_efficiency(
    efficiency: Option<f64>,
    efficiency_file: Option<&Path>,
) -> Result<f64, CliError> {
    match (efficiency, efficiency_file) {
        (Some(e), None) => Ok(e),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            text.trim().parse().map_err(|e| {
                CliError::data(format!("invalid efficiency in {}: {e}", path.display()))
            })
        }
        _ => Err(CliError::usage(
            "provide exactly one of --efficiency or --efficiency-file",
        )),
    }
}

fn cmd_advise(
    config: &ConfigArg,
    events: &[PathBuf],
    horizon: f64,
    efficiency: Option<f64>,
    efficiency_file: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = config.load()?;
    let eff = read_efficiency(efficiency, efficiency_file)?;
    let mut kinds = Vec::new();
    for path in events {
        kinds.extend(load_events(path)?.into_iter().map(|r| r.kind));
    }
    let rates = event_rate(kinds, horizon)?;
    let rec = advise_from_rates(&rates, eff, cfg.advisor)?;
    println!("verdict: {:?}", rec.verdict);
    println!("{}", rec.rationale);
    println!(
        "rates/week: Case1 {:.2}, Case2 {:.2}, Case3 {:.2}, Comfort {:.2}",
        rates.case1, rates.case2, rates.case3, rates.comfort
    );
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&rec)
            .map_err(|e| CliError::data(e.to_string()))?;
        std::fs::write(path, json)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
