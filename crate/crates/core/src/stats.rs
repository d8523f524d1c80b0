//! Pearson correlation and the SWIM-BIKE / BIKE-RUN correlation sum of an archive.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archive::Archive;

/// Fewer points than this and `r` is always ±1 or undefined.
pub const MIN_SAMPLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("correlation undefined: series lengths differ ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("correlation undefined: {0} samples, need at least {MIN_SAMPLES}")]
    TooFewSamples(usize),
    #[error("correlation undefined: {0:?} series has zero variance")]
    ZeroVariance(Series),
    #[error("correlation undefined: {0} column is constant")]
    ConstantColumn(&'static str),
    #[error("correlation undefined: non-finite value in input")]
    NonFinite,
}

/// Sample Pearson correlation of `x` and `y`, clamped to `[-1, 1]`.
///
/// Accumulates means and co-moments in one pass (Welford update), which keeps
/// the result stable for columns with a large common offset such as split
/// times in minutes.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < MIN_SAMPLES {
        return Err(StatsError::TooFewSamples(x.len()));
    }

    let (mut mean_x, mut mean_y) = (0.0, 0.0);
    let (mut m2_x, mut m2_y, mut c_xy) = (0.0, 0.0, 0.0);
    for (k, (&xi, &yi)) in x.iter().zip(y).enumerate() {
        if !(xi.is_finite() && yi.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        let n = (k + 1) as f64;
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        mean_x += dx / n;
        mean_y += dy / n;
        // uses the pre-update dx and the post-update deviation of the partner
        m2_x += dx * (xi - mean_x);
        m2_y += dy * (yi - mean_y);
        c_xy += dx * (yi - mean_y);
    }

    // exact constancy gives exactly zero here; anything below this is rounding noise
    let tiny = |m2: f64, mean: f64| m2 <= f64::EPSILON * f64::EPSILON * (mean * mean).max(1.0) * x.len() as f64;
    if m2_x <= 0.0 || tiny(m2_x, mean_x) {
        return Err(StatsError::ZeroVariance(Series::X));
    }
    if m2_y <= 0.0 || tiny(m2_y, mean_y) {
        return Err(StatsError::ZeroVariance(Series::Y));
    }

    Ok((c_xy / (m2_x * m2_y).sqrt()).clamp(-1.0, 1.0))
}

/// `r_swim_bike + r_bike_run` for one archive: r1 for the base archive,
/// r2 once a candidate has been appended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPair {
    pub r_swim_bike: f64,
    pub r_bike_run: f64,
    pub sum: f64,
}

impl CorrelationPair {
    pub fn new(r_swim_bike: f64, r_bike_run: f64) -> Self {
        CorrelationPair {
            r_swim_bike,
            r_bike_run,
            sum: r_swim_bike + r_bike_run,
        }
    }

    /// Correlation pair from raw swim, bike, run columns. Transitions never
    /// take part.
    pub fn from_columns(swim: &[f64], bike: &[f64], run: &[f64]) -> Result<Self, StatsError> {
        let name = |series, first, second| match series {
            Series::X => first,
            Series::Y => second,
        };
        let r_swim_bike = pearson(swim, bike).map_err(|e| match e {
            StatsError::ZeroVariance(s) => StatsError::ConstantColumn(name(s, "swim", "bike")),
            other => other,
        })?;
        let r_bike_run = pearson(bike, run).map_err(|e| match e {
            StatsError::ZeroVariance(s) => StatsError::ConstantColumn(name(s, "bike", "run")),
            other => other,
        })?;
        Ok(CorrelationPair::new(r_swim_bike, r_bike_run))
    }
}

pub fn archive_correlation(archive: &Archive) -> Result<CorrelationPair, StatsError> {
    let cols = archive.columns();
    CorrelationPair::from_columns(&cols.swim, &cols.bike, &cols.run)
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Sample standard deviation (n − 1 denominator). A single value has zero spread.
pub fn sample_stdev(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    if values.len() == 1 {
        return Some(0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}
