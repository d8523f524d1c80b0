//! Triathlon preference-time model: split vectors, per-discipline bounds, the
//! target ceiling `K_max` and the correlation-gated fitness that the swarm
//! minimises.
//!
//! A candidate `x = (swim, t1, bike, t2, run)` is scored against a reference
//! archive `Ar(n)`:
//!
//! ```text
//! h(x)  = swim + t1 + bike + t2 + run
//! r1    = r_swim_bike(Ar(n))   + r_bike_run(Ar(n))
//! r2    = r_swim_bike(Ar(n+1)) + r_bike_run(Ar(n+1))      Ar(n+1) = Ar(n) + x
//!
//! F(x)  = K_max − h(x)   if h(x) <= K_max and r1 < r2
//!       = MAX_TIME       otherwise
//! ```
//!
//! Minimising `F` pushes the total up against `K_max` from below while
//! keeping only candidates that strengthen the archive's correlation. The
//! ungated-distance form [`improvement_time`] and the plain-total form
//! [`fitness_literal`] are kept alongside for comparison: minimising the
//! latter drives totals to the sum of the lower bounds instead.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archive::{extend_archive, Archive};
use crate::pso::{self, PsoConfig, PsoConfigError};
use crate::stats::{archive_correlation, CorrelationPair, StatsError};
use crate::timekit::{Duration, InvalidDuration};

/// Sentinel fitness of infeasible candidates, in minutes.
pub const DEFAULT_MAX_TIME: f64 = 1.0e6;
/// `K_max` when none is given.
pub const DEFAULT_K_MAX: f64 = 300.0;
/// `from_personal_best` targets a 5 % improvement.
pub const PERSONAL_BEST_FACTOR: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discipline {
    Swim,
    T1,
    Bike,
    T2,
    Run,
}

impl Discipline {
    pub const ALL: [Discipline; 5] = [
        Discipline::Swim,
        Discipline::T1,
        Discipline::Bike,
        Discipline::T2,
        Discipline::Run,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Discipline::Swim => "swim",
            Discipline::T1 => "t1",
            Discipline::Bike => "bike",
            Discipline::T2 => "t2",
            Discipline::Run => "run",
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One candidate (or predicted) assignment of the five split times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitVector {
    pub swim: Duration,
    pub t1: Duration,
    pub bike: Duration,
    pub t2: Duration,
    pub run: Duration,
}

impl SplitVector {
    pub fn from_minutes(m: [f64; 5]) -> Result<Self, InvalidDuration> {
        Ok(SplitVector {
            swim: Duration::from_minutes(m[0])?,
            t1: Duration::from_minutes(m[1])?,
            bike: Duration::from_minutes(m[2])?,
            t2: Duration::from_minutes(m[3])?,
            run: Duration::from_minutes(m[4])?,
        })
    }

    /// Panics on a slice that is not length 5.
    pub fn from_slice(m: &[f64]) -> Result<Self, InvalidDuration> {
        let arr: [f64; 5] = m.try_into().expect("split vector has five components");
        Self::from_minutes(arr)
    }

    pub fn to_minutes(&self) -> [f64; 5] {
        [
            self.swim.minutes(),
            self.t1.minutes(),
            self.bike.minutes(),
            self.t2.minutes(),
            self.run.minutes(),
        ]
    }

    pub fn get(&self, d: Discipline) -> Duration {
        match d {
            Discipline::Swim => self.swim,
            Discipline::T1 => self.t1,
            Discipline::Bike => self.bike,
            Discipline::T2 => self.t2,
            Discipline::Run => self.run,
        }
    }

    pub fn total(&self) -> Duration {
        total_time(self)
    }
}

/// Closed interval `[low, high]` in minutes; (de)serialised as `[low, high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub const fn new(low: f64, high: f64) -> Self {
        Interval { low, high }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }
}

impl From<[f64; 2]> for Interval {
    fn from([low, high]: [f64; 2]) -> Self {
        Interval { low, high }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.low, i.high]
    }
}

/// Per-discipline search box. Defaults suit regular amateur athletes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitBounds {
    pub swim: Interval,
    pub t1: Interval,
    pub bike: Interval,
    pub t2: Interval,
    pub run: Interval,
}

impl Default for SplitBounds {
    fn default() -> Self {
        SplitBounds {
            swim: Interval::new(25.0, 50.0),
            t1: Interval::new(2.0, 5.0),
            bike: Interval::new(140.0, 180.0),
            t2: Interval::new(2.0, 5.0),
            run: Interval::new(85.0, 120.0),
        }
    }
}

impl SplitBounds {
    pub fn intervals(&self) -> [Interval; 5] {
        [self.swim, self.t1, self.bike, self.t2, self.run]
    }

    pub fn lower(&self) -> Vec<f64> {
        self.intervals().iter().map(|i| i.low).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.intervals().iter().map(|i| i.high).collect()
    }

    pub fn min_total(&self) -> f64 {
        self.intervals().iter().map(|i| i.low).sum()
    }

    pub fn max_total(&self) -> f64 {
        self.intervals().iter().map(|i| i.high).sum()
    }

    pub fn contains(&self, x: &SplitVector) -> bool {
        self.intervals().iter().zip(x.to_minutes()).all(|(i, v)| i.contains(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMaxPolicy {
    /// Use `k_max` as given.
    #[default]
    Explicit,
    /// `0.95 × personal_best`.
    FromPersonalBest,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("k_max policy is explicit but no k_max was given")]
    MissingKMax,
    #[error("k_max policy is from_personal_best but no personal best was given")]
    MissingPersonalBest,
    #[error("bound for {discipline}: [{low}, {high}] is not a valid interval of positive minutes")]
    BadBound {
        discipline: Discipline,
        low: f64,
        high: f64,
    },
    #[error("k_max {k_max:.2} min is outside the reachable totals [{min:.2}, {max:.2}]: no feasible split exists")]
    EmptyFeasibleSet { k_max: f64, min: f64, max: f64 },
    #[error("max_time {max_time} must exceed the largest reachable total {max_total}")]
    MaxTimeTooSmall { max_time: f64, max_total: f64 },
    #[error(transparent)]
    InvalidDuration(#[from] InvalidDuration),
    #[error("optimizer: {0}")]
    Pso(#[from] PsoConfigError),
    #[error("optimizer box must be the five split bounds")]
    PsoBoundsMismatch,
    #[error("reference archive: {0}")]
    Stats(#[from] StatsError),
    #[error(
        "no feasible solution found in {evaluations} evaluations (k_max too tight or archive cannot be correlated)"
    )]
    NoFeasibleSolution { evaluations: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub bounds: SplitBounds,
    pub k_max: Option<Duration>,
    pub max_time: Duration,
    pub k_max_policy: KMaxPolicy,
    pub personal_best: Option<Duration>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            bounds: SplitBounds::default(),
            k_max: Some(Duration::from_minutes(DEFAULT_K_MAX).expect("constant")),
            max_time: Duration::from_minutes(DEFAULT_MAX_TIME).expect("constant"),
            k_max_policy: KMaxPolicy::Explicit,
            personal_best: None,
        }
    }
}

impl ModelConfig {
    /// Default bounds, explicit ceiling.
    pub fn explicit(k_max: f64) -> Result<Self, ModelError> {
        let cfg = ModelConfig {
            k_max: Some(Duration::from_minutes(k_max)?),
            ..ModelConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default bounds, ceiling derived from the athlete's personal best.
    pub fn from_personal_best(personal_best: f64) -> Result<Self, ModelError> {
        let cfg = ModelConfig {
            k_max: None,
            k_max_policy: KMaxPolicy::FromPersonalBest,
            personal_best: Some(Duration::from_minutes(personal_best)?),
            ..ModelConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_bounds(self, bounds: SplitBounds) -> Result<Self, ModelError> {
        let cfg = ModelConfig { bounds, ..self };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_max_time(self, max_time: f64) -> Result<Self, ModelError> {
        let cfg = ModelConfig {
            max_time: Duration::from_minutes(max_time)?,
            ..self
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (d, i) in Discipline::ALL.into_iter().zip(self.bounds.intervals()) {
            if !(i.low.is_finite() && i.high.is_finite() && 0.0 < i.low && i.low < i.high) {
                return Err(ModelError::BadBound {
                    discipline: d,
                    low: i.low,
                    high: i.high,
                });
            }
        }
        let k_max = resolve_k_max(self)?.minutes();
        let (min, max) = (self.bounds.min_total(), self.bounds.max_total());
        if !(min..=max).contains(&k_max) {
            return Err(ModelError::EmptyFeasibleSet { k_max, min, max });
        }
        if self.max_time.minutes() <= max {
            return Err(ModelError::MaxTimeTooSmall {
                max_time: self.max_time.minutes(),
                max_total: max,
            });
        }
        Ok(())
    }

    /// Optimizer defaults (Np 50, maxFes 10 000, C1 = C2 = 2) over this model's box.
    pub fn pso_config(&self, seed: u64) -> PsoConfig {
        PsoConfig::with_bounds(self.bounds.lower(), self.bounds.upper(), seed)
    }
}

pub fn total_time(x: &SplitVector) -> Duration {
    x.swim + x.t1 + x.bike + x.t2 + x.run
}

/// Distance to the ceiling for totals *above* it, `MAX_TIME` otherwise.
/// Returns `MAX_TIME` as well if the ceiling cannot be resolved.
pub fn improvement_time(x: &SplitVector, cfg: &ModelConfig) -> f64 {
    let h = total_time(x).minutes();
    match resolve_k_max(cfg) {
        Ok(k) if k.minutes() < h => k.minutes() - h,
        _ => cfg.max_time.minutes(),
    }
}

pub fn resolve_k_max(cfg: &ModelConfig) -> Result<Duration, ModelError> {
    match cfg.k_max_policy {
        KMaxPolicy::Explicit => cfg.k_max.ok_or(ModelError::MissingKMax),
        KMaxPolicy::FromPersonalBest => {
            let pb = cfg.personal_best.ok_or(ModelError::MissingPersonalBest)?;
            Ok(Duration::from_minutes(PERSONAL_BEST_FACTOR * pb.minutes())?)
        }
    }
}

/// Reference fitness through the archive API: builds `Ar(n+1)` explicitly.
/// `base_correlation` must be `archive_correlation(base)`.
pub fn preference_fitness(
    x: &SplitVector,
    base: &Archive,
    cfg: &ModelConfig,
    base_correlation: &CorrelationPair,
) -> f64 {
    let max_time = cfg.max_time.minutes();
    let Ok(k_max) = resolve_k_max(cfg) else {
        return max_time;
    };
    let h = total_time(x).minutes();
    if h > k_max.minutes() {
        return max_time;
    }
    match archive_correlation(&extend_archive(base, x)) {
        Ok(r2) if base_correlation.sum < r2.sum => k_max.minutes() - h,
        _ => max_time,
    }
}

/// The plain-total objective: `h(x)` when the candidate raises the
/// correlation sum, `MAX_TIME` otherwise. No ceiling.
pub fn fitness_literal(x: &SplitVector, base: &Archive, cfg: &ModelConfig, base_correlation: &CorrelationPair) -> f64 {
    match archive_correlation(&extend_archive(base, x)) {
        Ok(r2) if base_correlation.sum < r2.sum => total_time(x).minutes(),
        _ => cfg.max_time.minutes(),
    }
}

/// Which objective [`PreferenceObjective`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `K_max − h` on the gated feasible set.
    #[default]
    CeilingGap,
    /// `h` whenever the correlation rises.
    PlainTotal,
}

/// Column-level fitness evaluator for one archive. Scores exactly like
/// [`preference_fitness`] / [`fitness_literal`] without cloning records.
#[derive(Debug, Clone)]
pub struct PreferenceObjective {
    swim: Vec<f64>,
    bike: Vec<f64>,
    run: Vec<f64>,
    r1: CorrelationPair,
    k_max: f64,
    max_time: f64,
    objective: Objective,
}

impl PreferenceObjective {
    pub fn new(base: &Archive, cfg: &ModelConfig, objective: Objective) -> Result<Self, ModelError> {
        cfg.validate()?;
        let r1 = archive_correlation(base)?;
        let cols = base.columns();
        Ok(PreferenceObjective {
            swim: cols.swim,
            bike: cols.bike,
            run: cols.run,
            r1,
            k_max: resolve_k_max(cfg)?.minutes(),
            max_time: cfg.max_time.minutes(),
            objective,
        })
    }

    pub fn base_correlation(&self) -> CorrelationPair {
        self.r1
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn max_time(&self) -> f64 {
        self.max_time
    }

    /// Correlation of the base archive with `x` (minutes, five components) appended.
    pub fn extended_correlation(&self, x: &[f64]) -> Result<CorrelationPair, StatsError> {
        let with = |col: &[f64], v: f64| {
            let mut out = Vec::with_capacity(col.len() + 1);
            out.extend_from_slice(col);
            out.push(v);
            out
        };
        CorrelationPair::from_columns(&with(&self.swim, x[0]), &with(&self.bike, x[2]), &with(&self.run, x[4]))
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let h: f64 = x.iter().sum();
        if self.objective == Objective::CeilingGap && h > self.k_max {
            return self.max_time;
        }
        match self.extended_correlation(x) {
            Ok(r2) if self.r1.sum < r2.sum => match self.objective {
                Objective::CeilingGap => self.k_max - h,
                Objective::PlainTotal => h,
            },
            _ => self.max_time,
        }
    }

    pub fn is_feasible(&self, value: f64) -> bool {
        value < self.max_time
    }
}

/// Result of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub splits: SplitVector,
    pub total: Duration,
    pub r1: f64,
    pub r2: f64,
    pub fitness: f64,
    pub evaluations: usize,
    pub history: Vec<f64>,
}

/// Searches for splits that total at most `K_max` as closely as possible while
/// raising the archive's correlation sum. `pso` must span `cfg.bounds`
/// (see [`ModelConfig::pso_config`]).
pub fn predict(base: &Archive, cfg: &ModelConfig, pso: &PsoConfig) -> Result<Prediction, ModelError> {
    predict_with(base, cfg, pso, Objective::CeilingGap)
}

pub fn predict_with(
    base: &Archive,
    cfg: &ModelConfig,
    pso_cfg: &PsoConfig,
    objective: Objective,
) -> Result<Prediction, ModelError> {
    pso_cfg.validate()?;
    if pso_cfg.dimension != 5 || pso_cfg.lower != cfg.bounds.lower() || pso_cfg.upper != cfg.bounds.upper() {
        return Err(ModelError::PsoBoundsMismatch);
    }
    let fitness = PreferenceObjective::new(base, cfg, objective)?;
    let outcome = pso::run(pso_cfg, &|x: &[f64]| fitness.evaluate(x));
    if !fitness.is_feasible(outcome.best_value) {
        return Err(ModelError::NoFeasibleSolution {
            evaluations: outcome.evaluations_used,
        });
    }
    let splits = SplitVector::from_slice(&outcome.best_position)?;
    let r2 = archive_correlation(&extend_archive(base, &splits))?;
    Ok(Prediction {
        splits,
        total: splits.total(),
        r1: fitness.base_correlation().sum,
        r2: r2.sum,
        fitness: outcome.best_value,
        evaluations: outcome.evaluations_used,
        history: outcome.history,
    })
}
