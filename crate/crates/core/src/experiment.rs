//! Repeated independent predictions and their report.
//!
//! Run `i` (1-based) uses seed `base_seed + i`, so every row of a report can be
//! reproduced on its own. Runs execute in parallel; rows are always assembled
//! in run order, so the output bytes depend only on the configuration.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archive::{load_archive, select_group, synthesize_archive, Archive, ArchiveError, InputFormat, SynthSpec};
use crate::model::{predict, resolve_k_max, ModelConfig, ModelError};
use crate::pso::PsoConfig;
use crate::stats::{archive_correlation, mean, sample_stdev, CorrelationPair, StatsError};
use crate::timekit::{format_duration, Duration, TimeStyle};

pub const DEFAULT_TOP_N: usize = 30;
pub const DEFAULT_RUNS: usize = 5;
pub const DEFAULT_GROUP: &str = "M25-29";

/// Column headings of the text table, in order.
pub const TABLE_COLUMNS: [&str; 7] = ["Run", "Swimming", "T1", "Cycling", "T2", "Running", "Total"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchiveSource {
    File { path: PathBuf, format: InputFormat },
    Synthetic(SynthSpec),
}

impl ArchiveSource {
    pub fn file(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let format = InputFormat::from_path(&path);
        ArchiveSource::File { path, format }
    }

    /// All records the source provides, before group selection.
    pub fn records(&self) -> Result<(String, Vec<crate::ResultRecord>, usize), ArchiveError> {
        match self {
            ArchiveSource::File { path, format } => {
                let loaded = load_archive(path, *format)?;
                let label = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let skipped = loaded.skip_count();
                Ok((label, loaded.records, skipped))
            }
            ArchiveSource::Synthetic(spec) => {
                let archive = synthesize_archive(spec)?;
                Ok((archive.label().to_string(), archive.records().to_vec(), 0))
            }
        }
    }

    /// Loads (or synthesises) and selects the reference archive. Also returns
    /// how many input rows were dropped as invalid.
    pub fn resolve(&self, group: &str, top_n: usize) -> Result<(Archive, usize), ArchiveError> {
        let (label, records, skipped) = self.records()?;
        Ok((select_group(&records, group, top_n)?.with_label(label), skipped))
    }
}

/// Optimizer parameters that are not derived from the model's bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub swarm_size: usize,
    pub max_evaluations: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            swarm_size: PsoConfig::DEFAULT_SWARM_SIZE,
            max_evaluations: PsoConfig::DEFAULT_MAX_EVALUATIONS,
            c1: PsoConfig::DEFAULT_LEARNING_FACTOR,
            c2: PsoConfig::DEFAULT_LEARNING_FACTOR,
        }
    }
}

impl PsoParams {
    pub fn config(&self, model: &ModelConfig, seed: u64) -> PsoConfig {
        PsoConfig {
            swarm_size: self.swarm_size,
            max_evaluations: self.max_evaluations,
            c1: self.c1,
            c2: self.c2,
            ..model.pso_config(seed)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: ArchiveSource,
    pub group: String,
    pub top_n: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub pso: PsoParams,
    pub model: ModelConfig,
    pub output: OutputFormat,
}

impl ExperimentConfig {
    /// Five runs over the top 30 of the default group, K_max 300, seed 0.
    pub fn new(source: ArchiveSource) -> Self {
        ExperimentConfig {
            source,
            group: DEFAULT_GROUP.to_string(),
            top_n: DEFAULT_TOP_N,
            runs: DEFAULT_RUNS,
            base_seed: 0,
            pso: PsoParams::default(),
            model: ModelConfig::default(),
            output: OutputFormat::Text,
        }
    }

    pub fn seed_for(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("archive: {0}")]
    Archive(#[from] ArchiveError),
    #[error("archive correlation: {0}")]
    Correlation(#[from] StatsError),
    #[error("configuration: {0}")]
    Config(#[from] ModelError),
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("all {runs} runs were infeasible")]
    AllInfeasible { runs: usize },
    #[error("writing report: {0}")]
    Output(#[from] std::io::Error),
}

impl ExperimentError {
    /// Process exit status for the CLI: 3 archive problems, 4 nothing feasible,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Archive(_) | ExperimentError::Correlation(_) => 3,
            ExperimentError::AllInfeasible { .. } => 4,
            _ => 1,
        }
    }
}

/// Five splits and the total, minutes and rendered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeRow {
    /// swim, t1, bike, t2, run, total
    pub minutes: [f64; 6],
    pub formatted: [String; 6],
}

impl TimeRow {
    pub fn new(minutes: [f64; 6]) -> Self {
        let formatted = minutes.map(|m| format_duration(Duration::from_minutes(m).unwrap_or_default(), TimeStyle::Ms));
        TimeRow { minutes, formatted }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run: usize,
    pub seed: u64,
    pub times: TimeRow,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRun {
    pub run: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub label: String,
    pub group: String,
    pub archive_size: usize,
    /// Input rows dropped while loading.
    pub skipped_rows: usize,
    pub k_max: f64,
    pub correlation: Option<CorrelationPair>,
    pub per_run: Vec<RunRow>,
    pub failed: Vec<FailedRun>,
    /// Componentwise over successful runs; `None` when there are none.
    pub mean: Option<TimeRow>,
    /// Sample standard deviation (n − 1); zeros for a single run.
    pub stdev: Option<TimeRow>,
}

impl ExperimentReport {
    /// Report over already-computed rows; aggregates are derived here.
    pub fn from_rows(
        label: String,
        group: String,
        archive_size: usize,
        k_max: f64,
        correlation: Option<CorrelationPair>,
        per_run: Vec<RunRow>,
        failed: Vec<FailedRun>,
    ) -> Self {
        let column = |k: usize| per_run.iter().map(|r| r.times.minutes[k]).collect::<Vec<_>>();
        let aggregate = |f: fn(&[f64]) -> Option<f64>| -> Option<TimeRow> {
            let mut out = [0.0; 6];
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = f(&column(k))?;
            }
            Some(TimeRow::new(out))
        };
        ExperimentReport {
            mean: aggregate(mean),
            stdev: aggregate(sample_stdev),
            label,
            group,
            archive_size,
            skipped_rows: 0,
            k_max,
            correlation,
            per_run,
            failed,
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    if cfg.runs == 0 {
        return Err(ExperimentError::NoRuns);
    }
    cfg.model.validate()?;
    cfg.pso
        .config(&cfg.model, cfg.base_seed)
        .validate()
        .map_err(ModelError::from)?;
    let (archive, skipped_rows) = cfg.source.resolve(&cfg.group, cfg.top_n)?;
    let correlation = archive_correlation(&archive)?;
    let k_max = resolve_k_max(&cfg.model)?.minutes();

    let outcomes: Vec<_> = (1..=cfg.runs)
        .into_par_iter()
        .map(|run| {
            let seed = cfg.seed_for(run);
            (
                run,
                seed,
                predict(&archive, &cfg.model, &cfg.pso.config(&cfg.model, seed)),
            )
        })
        .collect();

    let mut per_run = Vec::new();
    let mut failed = Vec::new();
    for (run, seed, outcome) in outcomes {
        match outcome {
            Ok(p) => {
                let m = p.splits.to_minutes();
                per_run.push(RunRow {
                    run,
                    seed,
                    times: TimeRow::new([m[0], m[1], m[2], m[3], m[4], p.total.minutes()]),
                    r1: p.r1,
                    r2: p.r2,
                });
            }
            Err(e @ ModelError::NoFeasibleSolution { .. }) => failed.push(FailedRun {
                run,
                seed,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    if per_run.is_empty() {
        return Err(ExperimentError::AllInfeasible { runs: cfg.runs });
    }

    Ok(ExperimentReport {
        skipped_rows,
        ..ExperimentReport::from_rows(
            archive.label().to_string(),
            archive.group().to_string(),
            archive.len(),
            k_max,
            Some(correlation),
            per_run,
            failed,
        )
    })
}

pub fn emit_report(report: &ExperimentReport, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Text => text_table(report).into_bytes(),
        OutputFormat::Csv => csv_table(report),
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serialises");
            out.push(b'\n');
            out
        }
    }
}

pub fn write_report<W: Write>(report: &ExperimentReport, format: OutputFormat, mut w: W) -> std::io::Result<()> {
    w.write_all(&emit_report(report, format))?;
    w.flush()
}

fn text_table(report: &ExperimentReport) -> String {
    let mut out = TABLE_COLUMNS.join(" | ");
    out.push('\n');
    let line = |out: &mut String, head: &str, row: &TimeRow| {
        out.push_str(head);
        for cell in &row.formatted {
            out.push_str(" | ");
            out.push_str(cell);
        }
        out.push('\n');
    };

    let mut rows = report.per_run.iter().peekable();
    let mut failures = report.failed.iter().peekable();
    loop {
        let next_ok = rows.peek().map(|r| r.run);
        let next_failed = failures.peek().map(|f| f.run);
        match (next_ok, next_failed) {
            (Some(a), Some(b)) if b < a => {
                let f = failures.next().unwrap();
                out.push_str(&format!("{} | failed: {}\n", f.run, f.reason));
            }
            (Some(_), _) => {
                let r = rows.next().unwrap();
                line(&mut out, &r.run.to_string(), &r.times);
            }
            (None, Some(_)) => {
                let f = failures.next().unwrap();
                out.push_str(&format!("{} | failed: {}\n", f.run, f.reason));
            }
            (None, None) => break,
        }
    }
    if let Some(m) = &report.mean {
        line(&mut out, "Mean", m);
    }
    if let Some(s) = &report.stdev {
        line(&mut out, "Stdev", s);
    }
    out
}

const CSV_HEADER: [&str; 17] = [
    "run",
    "seed",
    "status",
    "swim_min",
    "t1_min",
    "bike_min",
    "t2_min",
    "run_min",
    "total_min",
    "swim",
    "t1",
    "bike",
    "t2",
    "run_time",
    "total",
    "r1",
    "r2",
];

fn csv_table(report: &ExperimentReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = "writing to memory";
    w.write_record(CSV_HEADER).expect(io);
    let times = |t: &TimeRow| -> Vec<String> {
        t.minutes
            .iter()
            .map(|m| m.to_string())
            .chain(t.formatted.iter().cloned())
            .collect()
    };
    let mut rows: Vec<(usize, Vec<String>)> = report
        .per_run
        .iter()
        .map(|r| {
            let mut rec = vec![r.run.to_string(), r.seed.to_string(), "ok".to_string()];
            rec.extend(times(&r.times));
            rec.extend([r.r1.to_string(), r.r2.to_string()]);
            (r.run, rec)
        })
        .collect();
    rows.extend(report.failed.iter().map(|f| {
        let mut rec = vec![f.run.to_string(), f.seed.to_string(), format!("failed: {}", f.reason)];
        rec.resize(CSV_HEADER.len(), String::new());
        (f.run, rec)
    }));
    rows.sort_by_key(|(run, _)| *run);
    for (_, rec) in rows {
        w.write_record(&rec).expect(io);
    }
    for (name, row) in [("mean", &report.mean), ("stdev", &report.stdev)] {
        if let Some(t) = row {
            let mut rec = vec![name.to_string(), String::new(), String::new()];
            rec.extend(times(t));
            rec.extend([String::new(), String::new()]);
            w.write_record(&rec).expect(io);
        }
    }
    w.into_inner().expect(io)
}

/// Correlation diagnostic for the selected archive.
pub fn correlate_command(
    source: &ArchiveSource,
    group: &str,
    top_n: usize,
) -> Result<CorrelationPair, ExperimentError> {
    let (archive, _) = source.resolve(group, top_n)?;
    Ok(archive_correlation(&archive)?)
}

pub fn render_correlation(pair: &CorrelationPair) -> String {
    format!(
        "r_swim_bike = {:.4}\nr_bike_run = {:.4}\nsum = {:.4}\n",
        pair.r_swim_bike, pair.r_bike_run, pair.sum
    )
}
