//! Race-result archives: loading, group selection, candidate extension and
//! synthetic generation.
//!
//! An [`Archive`] is the reference population for the correlation fitness:
//! the top finishers of one category in one race, ordered by finish place.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::SplitVector;
use crate::stats::{CorrelationPair, MIN_SAMPLES};
use crate::timekit::{format_duration, parse_duration, Duration, FormatHint, TimeParseError, TimeStyle};

/// Allowed gap between `overall` and the sum of the five splits, in minutes.
/// Published results round each split independently.
pub const OVERALL_SLACK: f64 = 0.05;

/// Name carried by the record [`extend_archive`] appends.
pub const PREDICTION_NAME: &str = "PREDICTION";

pub const COLUMNS: [&str; 10] = [
    "name", "nation", "category", "place", "swim", "t1", "bike", "t2", "run", "overall",
];

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("missing column {0:?}")]
    MissingColumn(&'static str),
    #[error("zero parseable rows ({skipped} skipped)")]
    NoRows { skipped: usize },
    #[error("archive is empty")]
    Empty,
    #[error("finish places must be strictly increasing (place {place} follows {previous})")]
    PlacesNotIncreasing { previous: u32, place: u32 },
    #[error("top_n must be at least {MIN_SAMPLES}, got {0}")]
    TopNTooSmall(usize),
    #[error("group {group:?} has {found} records, need at least {MIN_SAMPLES}")]
    GroupTooSmall { group: String, found: usize },
    #[error("invalid synthesis spec: {0}")]
    InvalidSynthSpec(String),
    #[error(
        "could not reach target correlations after {attempts} attempts \
         (achieved swim-bike {achieved_swim_bike:.4}, bike-run {achieved_bike_run:.4})"
    )]
    Unattainable {
        attempts: usize,
        achieved_swim_bike: f64,
        achieved_bike_run: f64,
    },
}

/// One finisher's row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub athlete_name: String,
    pub nation: String,
    pub category: String,
    pub finish_place: u32,
    pub swim: Duration,
    pub t1: Duration,
    pub bike: Duration,
    pub t2: Duration,
    pub run: Duration,
    pub overall: Duration,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordProblem {
    #[error("column {column:?}: {source}")]
    Time {
        column: &'static str,
        #[source]
        source: TimeParseError,
    },
    #[error("place {0:?} is not a positive integer")]
    Place(String),
    #[error("{0} split is not positive")]
    NonPositiveSplit(&'static str),
    #[error("overall {overall:.3} min differs from split sum {sum:.3} min")]
    OverallMismatch { overall: f64, sum: f64 },
}

impl ResultRecord {
    pub fn splits(&self) -> [Duration; 5] {
        [self.swim, self.t1, self.bike, self.t2, self.run]
    }

    pub fn split_sum(&self) -> Duration {
        self.splits().into_iter().sum()
    }

    pub fn check(&self) -> Result<(), RecordProblem> {
        if self.finish_place == 0 {
            return Err(RecordProblem::Place("0".into()));
        }
        for (name, split) in ["swim", "t1", "bike", "t2", "run"].into_iter().zip(self.splits()) {
            if split.minutes() <= 0.0 {
                return Err(RecordProblem::NonPositiveSplit(name));
            }
        }
        let sum = self.split_sum().minutes();
        if (sum - self.overall.minutes()).abs() > OVERALL_SLACK {
            return Err(RecordProblem::OverallMismatch {
                overall: self.overall.minutes(),
                sum,
            });
        }
        Ok(())
    }
}

/// Split columns of an archive, in record order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Columns {
    pub swim: Vec<f64>,
    pub t1: Vec<f64>,
    pub bike: Vec<f64>,
    pub t2: Vec<f64>,
    pub run: Vec<f64>,
}

/// Ordered, immutable collection of records for one race and group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Archive {
    label: String,
    group: String,
    records: Vec<ResultRecord>,
}

impl Archive {
    /// Records must be non-empty with strictly increasing finish places.
    pub fn new(
        label: impl Into<String>,
        group: impl Into<String>,
        records: Vec<ResultRecord>,
    ) -> Result<Self, ArchiveError> {
        if records.is_empty() {
            return Err(ArchiveError::Empty);
        }
        for pair in records.windows(2) {
            if pair[1].finish_place <= pair[0].finish_place {
                return Err(ArchiveError::PlacesNotIncreasing {
                    previous: pair[0].finish_place,
                    place: pair[1].finish_place,
                });
            }
        }
        Ok(Archive {
            label: label.into(),
            group: group.into(),
            records,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn group(&self) -> &str {
        &self.group
    }

    pub fn records(&self) -> &[ResultRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn columns(&self) -> Columns {
        let mut cols = Columns::default();
        for r in &self.records {
            cols.swim.push(r.swim.minutes());
            cols.t1.push(r.t1.minutes());
            cols.bike.push(r.bike.minutes());
            cols.t2.push(r.t2.minutes());
            cols.run.push(r.run.minutes());
        }
        cols
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRow {
    /// 1-based data row (header excluded).
    pub row: usize,
    pub problem: RecordProblem,
}

/// Parsed rows plus the rows that were dropped for violating record invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedRecords {
    pub records: Vec<ResultRecord>,
    pub skipped: Vec<SkippedRow>,
}

impl LoadedRecords {
    pub fn skip_count(&self) -> usize {
        self.skipped.len()
    }
}

pub fn load_archive(path: &Path, format: InputFormat) -> Result<LoadedRecords, ArchiveError> {
    let file = File::open(path).map_err(|source| ArchiveError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);
    match format {
        InputFormat::Csv => read_csv(reader),
        InputFormat::Json => read_json(reader),
    }
}

/// Untyped row: ten strings keyed by [`COLUMNS`] order.
type RawRow = [String; 10];

pub fn read_csv<R: Read>(reader: R) -> Result<LoadedRecords, ArchiveError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let index = column_index(headers.iter())?;

    let mut rows = Vec::new();
    for result in rdr.records() {
        let rec = result?;
        rows.push(index.map(|i| rec.get(i).unwrap_or("").to_string()));
    }
    collect_rows(rows)
}

pub fn read_json<R: Read>(reader: R) -> Result<LoadedRecords, ArchiveError> {
    let values: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_reader(reader)?;
    let mut rows = Vec::with_capacity(values.len());
    for obj in values {
        for key in obj.keys() {
            if !COLUMNS.contains(&key.as_str()) {
                return Err(ArchiveError::UnknownColumn(key.clone()));
            }
        }
        let mut row: RawRow = Default::default();
        for (slot, col) in row.iter_mut().zip(COLUMNS) {
            *slot = match obj.get(col) {
                Some(serde_json::Value::String(s)) => s.clone(),
                Some(serde_json::Value::Null) | None => return Err(ArchiveError::MissingColumn(col)),
                Some(other) => other.to_string(),
            };
        }
        rows.push(row);
    }
    collect_rows(rows)
}

fn column_index<'a>(headers: impl Iterator<Item = &'a str>) -> Result<[usize; 10], ArchiveError> {
    let mut index = [usize::MAX; 10];
    for (pos, name) in headers.enumerate() {
        let slot = COLUMNS
            .iter()
            .position(|c| c.eq_ignore_ascii_case(name))
            .ok_or_else(|| ArchiveError::UnknownColumn(name.to_string()))?;
        index[slot] = pos;
    }
    if let Some(missing) = index.iter().position(|&i| i == usize::MAX) {
        return Err(ArchiveError::MissingColumn(COLUMNS[missing]));
    }
    Ok(index)
}

fn collect_rows(rows: Vec<RawRow>) -> Result<LoadedRecords, ArchiveError> {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        match parse_row(row) {
            Ok(r) => records.push(r),
            Err(problem) => skipped.push(SkippedRow { row: i + 1, problem }),
        }
    }
    if records.is_empty() {
        return Err(ArchiveError::NoRows { skipped: skipped.len() });
    }
    Ok(LoadedRecords { records, skipped })
}

fn parse_row(row: RawRow) -> Result<ResultRecord, RecordProblem> {
    let [name, nation, category, place, swim, t1, bike, t2, run, overall] = row;
    let time = |column: &'static str, text: &str| {
        parse_duration(text, FormatHint::Auto).map_err(|source| RecordProblem::Time { column, source })
    };
    let finish_place = match place.parse::<u32>() {
        Ok(p) if p > 0 => p,
        _ => return Err(RecordProblem::Place(place)),
    };
    let record = ResultRecord {
        athlete_name: name,
        nation,
        category,
        finish_place,
        swim: time("swim", &swim)?,
        t1: time("t1", &t1)?,
        bike: time("bike", &bike)?,
        t2: time("t2", &t2)?,
        run: time("run", &run)?,
        overall: time("overall", &overall)?,
    };
    record.check()?;
    Ok(record)
}

fn row_strings(r: &ResultRecord, style: TimeStyle) -> [String; 10] {
    let t = |d| format_duration(d, style);
    [
        r.athlete_name.clone(),
        r.nation.clone(),
        r.category.clone(),
        r.finish_place.to_string(),
        t(r.swim),
        t(r.t1),
        t(r.bike),
        t(r.t2),
        t(r.run),
        t(r.overall),
    ]
}

/// Writes records in the loader's CSV schema, times as `h:mm:ss.cc`.
pub fn write_csv<W: Write>(records: &[ResultRecord], writer: W) -> Result<(), ArchiveError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(row_strings(r, TimeStyle::Hms))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes records in the loader's JSON schema (place as an integer).
pub fn write_json<W: Write>(records: &[ResultRecord], writer: W) -> Result<(), ArchiveError> {
    let rows: Vec<serde_json::Map<String, serde_json::Value>> = records
        .iter()
        .map(|r| {
            COLUMNS
                .iter()
                .zip(row_strings(r, TimeStyle::Hms))
                .map(|(k, v)| {
                    let value = if *k == "place" {
                        serde_json::Value::from(r.finish_place)
                    } else {
                        serde_json::Value::String(v)
                    };
                    (k.to_string(), value)
                })
                .collect()
        })
        .collect();
    serde_json::to_writer_pretty(writer, &rows)?;
    Ok(())
}

/// Keeps `group` (case-insensitive), orders by finish place and truncates to `top_n`.
pub fn select_group(records: &[ResultRecord], group: &str, top_n: usize) -> Result<Archive, ArchiveError> {
    if top_n < MIN_SAMPLES {
        return Err(ArchiveError::TopNTooSmall(top_n));
    }
    let wanted = group.trim();
    let mut chosen: Vec<ResultRecord> = records
        .iter()
        .filter(|r| r.category.trim().eq_ignore_ascii_case(wanted))
        .cloned()
        .collect();
    chosen.sort_by_key(|r| r.finish_place);
    chosen.truncate(top_n);
    if chosen.len() < MIN_SAMPLES {
        return Err(ArchiveError::GroupTooSmall {
            group: wanted.to_string(),
            found: chosen.len(),
        });
    }
    Archive::new("", wanted, chosen)
}

/// Copy of `base` with the prediction appended as a placeholder record.
pub fn extend_archive(base: &Archive, prediction: &SplitVector) -> Archive {
    let last_place = base.records.last().map_or(0, |r| r.finish_place);
    let place = last_place.max(base.len() as u32) + 1;
    let mut records = Vec::with_capacity(base.len() + 1);
    records.extend_from_slice(&base.records);
    records.push(ResultRecord {
        athlete_name: PREDICTION_NAME.to_string(),
        nation: String::new(),
        category: base.group.clone(),
        finish_place: place,
        swim: prediction.swim,
        t1: prediction.t1,
        bike: prediction.bike,
        t2: prediction.t2,
        run: prediction.run,
        overall: prediction.total(),
    });
    Archive {
        label: base.label.clone(),
        group: base.group.clone(),
        records,
    }
}

fn default_label() -> String {
    "synthetic".to_string()
}

fn default_category() -> String {
    "M25-29".to_string()
}

fn default_means() -> [f64; 5] {
    AGE_GROUP_MEANS
}

fn default_spreads() -> [f64; 5] {
    AGE_GROUP_SPREADS
}

/// Parameters of a synthetic archive with controlled swim-bike and bike-run
/// correlation. Split order everywhere: swim, t1, bike, t2, run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub size: usize,
    pub target_swim_bike_r: f64,
    pub target_bike_run_r: f64,
    #[serde(default = "default_means")]
    pub split_means: [f64; 5],
    #[serde(default = "default_spreads")]
    pub split_spreads: [f64; 5],
    #[serde(default = "default_label")]
    pub label: String,
    #[serde(default = "default_category")]
    pub category: String,
}

/// Achieved correlations must land this close to the targets.
pub const SYNTH_TOLERANCE: f64 = 0.05;
const SYNTH_ATTEMPTS: usize = 1000;

/// Split means and spreads (minutes) loosely shaped after the top 30 of a
/// middle-distance age group finishing between roughly 4:15 and 5:00.
pub const AGE_GROUP_MEANS: [f64; 5] = [32.0, 3.0, 152.0, 2.5, 95.0];
pub const AGE_GROUP_SPREADS: [f64; 5] = [3.5, 0.8, 9.0, 0.6, 9.0];

impl SynthSpec {
    pub fn new(seed: u64, size: usize, target_swim_bike_r: f64, target_bike_run_r: f64) -> Self {
        SynthSpec {
            seed,
            size,
            target_swim_bike_r,
            target_bike_run_r,
            split_means: AGE_GROUP_MEANS,
            split_spreads: AGE_GROUP_SPREADS,
            label: default_label(),
            category: default_category(),
        }
    }

    /// 30 records, correlation sum 0.73: a strongly ordered field.
    pub fn high_correlation(seed: u64) -> Self {
        SynthSpec {
            label: "synthetic-high".into(),
            ..SynthSpec::new(seed, 30, 0.73, 0.0)
        }
    }

    /// 30 records, correlation sum 0.21: a weakly ordered field.
    pub fn low_correlation(seed: u64) -> Self {
        SynthSpec {
            label: "synthetic-low".into(),
            ..SynthSpec::new(seed, 30, 0.21, 0.0)
        }
    }

    fn validate(&self) -> Result<(), ArchiveError> {
        let bad = |msg: String| Err(ArchiveError::InvalidSynthSpec(msg));
        if self.size < 5 {
            return bad(format!("size must be at least 5, got {}", self.size));
        }
        for (name, r) in [
            ("target_swim_bike_r", self.target_swim_bike_r),
            ("target_bike_run_r", self.target_bike_run_r),
        ] {
            if !(-1.0..=1.0).contains(&r) {
                return bad(format!("{name} = {r} is outside [-1, 1]"));
            }
        }
        if self.split_means.iter().any(|m| !m.is_finite() || *m <= 0.0) {
            return bad("split means must be positive".into());
        }
        if self.split_spreads.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return bad("split spreads must be positive".into());
        }
        Ok(())
    }
}

/// Generates an archive whose swim-bike and bike-run sample correlations hit
/// the targets.
///
/// The bike column is a standardised latent draw; swim and run each mix that
/// latent with an independent draw orthogonalised against it, so the sample
/// correlation equals the target up to rounding. Draws that produce a
/// non-positive split are discarded and redrawn.
pub fn synthesize_archive(spec: &SynthSpec) -> Result<Archive, ArchiveError> {
    spec.validate()?;
    let n = spec.size;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut achieved = (f64::NAN, f64::NAN);

    for _ in 0..SYNTH_ATTEMPTS {
        let latent = match unit_centred(normal_vec(&mut rng, n)) {
            Some(v) => v,
            None => continue,
        };
        let (Some(swim_std), Some(run_std)) = (
            mix_with(&latent, spec.target_swim_bike_r, &mut rng),
            mix_with(&latent, spec.target_bike_run_r, &mut rng),
        ) else {
            continue;
        };
        // unit norm -> unit sample variance
        let scale = ((n - 1) as f64).sqrt();
        let column = |k: usize, std: &[f64], scale: f64| -> Vec<f64> {
            std.iter()
                .map(|z| spec.split_means[k] + spec.split_spreads[k] * scale * z)
                .collect()
        };
        let swim = column(0, &swim_std, scale);
        let bike = column(2, &latent, scale);
        let run = column(4, &run_std, scale);
        let t1 = column(1, &normal_vec(&mut rng, n), 1.0);
        let t2 = column(3, &normal_vec(&mut rng, n), 1.0);

        let all_positive = [&swim, &t1, &bike, &t2, &run]
            .iter()
            .all(|c| c.iter().all(|v| *v > 0.0));
        if !all_positive {
            continue;
        }
        let Ok(pair) = CorrelationPair::from_columns(&swim, &bike, &run) else {
            continue;
        };
        achieved = (pair.r_swim_bike, pair.r_bike_run);
        if (pair.r_swim_bike - spec.target_swim_bike_r).abs() > SYNTH_TOLERANCE
            || (pair.r_bike_run - spec.target_bike_run_r).abs() > SYNTH_TOLERANCE
        {
            continue;
        }

        let mut records: Vec<ResultRecord> = (0..n)
            .map(|i| {
                let d = |v: f64| Duration::from_minutes(v).expect("positive by construction");
                let splits = [d(swim[i]), d(t1[i]), d(bike[i]), d(t2[i]), d(run[i])];
                ResultRecord {
                    athlete_name: String::new(),
                    nation: "SYN".into(),
                    category: spec.category.clone(),
                    finish_place: 0,
                    swim: splits[0],
                    t1: splits[1],
                    bike: splits[2],
                    t2: splits[3],
                    run: splits[4],
                    overall: splits.into_iter().sum(),
                }
            })
            .collect();
        records.sort_by(|a, b| a.overall.minutes().total_cmp(&b.overall.minutes()));
        for (i, r) in records.iter_mut().enumerate() {
            r.finish_place = i as u32 + 1;
            r.athlete_name = format!("Synthetic Athlete {:02}", i + 1);
        }
        return Archive::new(spec.label.clone(), spec.category.clone(), records);
    }

    Err(ArchiveError::Unattainable {
        attempts: SYNTH_ATTEMPTS,
        achieved_swim_bike: achieved.0,
        achieved_bike_run: achieved.1,
    })
}

fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Centres `v` and scales it to unit Euclidean norm.
fn unit_centred(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-9 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

/// `r·latent + sqrt(1 − r²)·noise` with noise centred, orthogonal to `latent`
/// and of unit norm, so the result has sample correlation exactly `r` with `latent`.
fn mix_with(latent: &[f64], r: f64, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let mut noise = normal_vec(rng, latent.len());
    let mean = noise.iter().sum::<f64>() / noise.len() as f64;
    noise.iter_mut().for_each(|x| *x -= mean);
    let proj: f64 = noise.iter().zip(latent).map(|(a, b)| a * b).sum();
    noise.iter_mut().zip(latent).for_each(|(x, l)| *x -= proj * l);
    let noise = unit_centred(noise)?;
    let w = (1.0 - r * r).max(0.0).sqrt();
    Some(latent.iter().zip(&noise).map(|(l, e)| r * l + w * e).collect())
}
