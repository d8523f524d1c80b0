//! Race-time strings to and from floating-point minutes.
//!
//! Every quantity that crosses a module boundary is a [`Duration`] in minutes.
//! Strings only exist at the edges: result files and printed reports.
//!
//! Accepted grammar (leading/trailing whitespace ignored):
//!
//! | form              | example        | notes                         |
//! |-------------------|----------------|-------------------------------|
//! | `h:mm:ss[.frac]`  | `4:59:59.82`   | minutes and seconds below 60  |
//! | `mm:ss[.frac]`    | `33:51.15`     | minutes and seconds below 60  |
//! | `m[.frac]`        | `24.00`        | decimal minutes               |
//!
//! In [`FormatHint::Auto`] mode the number of colons picks the form.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hundredths of a second per minute.
const CENTIS_PER_MINUTE: f64 = 6000.0;
const CENTIS_PER_HOUR: u64 = 360_000;

/// A non-negative, finite time span in minutes.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Duration(f64);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("invalid duration: {0} minutes (must be finite and non-negative)")]
pub struct InvalidDuration(pub f64);

impl Duration {
    pub const ZERO: Duration = Duration(0.0);

    pub fn from_minutes(minutes: f64) -> Result<Self, InvalidDuration> {
        if minutes.is_finite() && minutes >= 0.0 {
            // normalise -0.0
            Ok(Duration(minutes + 0.0))
        } else {
            Err(InvalidDuration(minutes))
        }
    }

    pub fn from_seconds(seconds: f64) -> Result<Self, InvalidDuration> {
        Self::from_minutes(seconds / 60.0).map_err(|_| InvalidDuration(seconds / 60.0))
    }

    #[inline]
    pub fn minutes(self) -> f64 {
        self.0
    }

    pub fn seconds(self) -> f64 {
        self.0 * 60.0
    }

    pub fn format(self, style: TimeStyle) -> String {
        format_duration(self, style)
    }
}

impl TryFrom<f64> for Duration {
    type Error = InvalidDuration;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Duration::from_minutes(value)
    }
}

impl From<Duration> for f64 {
    fn from(d: Duration) -> f64 {
        d.0
    }
}

impl Add for Duration {
    type Output = Duration;

    fn add(self, rhs: Duration) -> Duration {
        Duration(self.0 + rhs.0)
    }
}

/// Saturates at zero.
impl Sub for Duration {
    type Output = Duration;

    fn sub(self, rhs: Duration) -> Duration {
        Duration((self.0 - rhs.0).max(0.0))
    }
}

impl Sum for Duration {
    fn sum<I: Iterator<Item = Duration>>(iter: I) -> Duration {
        iter.fold(Duration::ZERO, Add::add)
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_duration(*self, TimeStyle::Hms))
    }
}

impl FromStr for Duration {
    type Err = TimeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_duration(s, FormatHint::Auto)
    }
}

/// Which grammar [`parse_duration`] should apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatHint {
    #[default]
    Auto,
    Hms,
    Ms,
    DecimalMinutes,
}

/// Output rendering for [`format_duration`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeStyle {
    /// `h:mm:ss.cc`
    Hms,
    /// `m:ss.cc` below one hour; spans of an hour or more fall back to `h:mm:ss.cc`
    /// because the minutes field of the two-field form is capped at 59.
    Ms,
    /// `m.mm`, two decimals.
    DecimalMinutes,
}

impl TimeStyle {
    /// Worst-case absolute error, in minutes, of a format/parse round trip.
    pub fn half_resolution(self) -> f64 {
        match self {
            TimeStyle::Hms | TimeStyle::Ms => 0.5 / CENTIS_PER_MINUTE,
            TimeStyle::DecimalMinutes => 0.005,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeField {
    Hours,
    Minutes,
    Seconds,
    /// The text as a whole (empty input, wrong number of fields).
    Text,
}

impl fmt::Display for TimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeField::Hours => "hours field",
            TimeField::Minutes => "minutes field",
            TimeField::Seconds => "seconds field",
            TimeField::Text => "text",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseProblem {
    Empty,
    WrongFieldCount,
    Malformed,
    Negative,
    OutOfRange,
}

impl fmt::Display for ParseProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseProblem::Empty => "is empty",
            ParseProblem::WrongFieldCount => "has the wrong number of ':'-separated fields",
            ParseProblem::Malformed => "is not a number",
            ParseProblem::Negative => "is negative",
            ParseProblem::OutOfRange => "must be below 60",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse time {text:?}: {field} {problem}")]
pub struct TimeParseError {
    pub text: String,
    pub field: TimeField,
    pub problem: ParseProblem,
}

pub fn parse_duration(text: &str, hint: FormatHint) -> Result<Duration, TimeParseError> {
    let trimmed = text.trim();
    let fail = |field, problem| TimeParseError {
        text: text.to_string(),
        field,
        problem,
    };
    if trimmed.is_empty() {
        return Err(fail(TimeField::Text, ParseProblem::Empty));
    }

    let fields: Vec<&str> = trimmed.split(':').collect();
    let hint = match hint {
        FormatHint::Auto => match fields.len() {
            1 => FormatHint::DecimalMinutes,
            2 => FormatHint::Ms,
            3 => FormatHint::Hms,
            _ => return Err(fail(TimeField::Text, ParseProblem::WrongFieldCount)),
        },
        h => h,
    };

    let minutes = match (hint, fields.as_slice()) {
        (FormatHint::DecimalMinutes, [m]) => number(m, true).map_err(|p| fail(TimeField::Minutes, p))?,
        (FormatHint::Ms, [m, s]) => {
            let m = positional(m, false, true).map_err(|p| fail(TimeField::Minutes, p))?;
            let s = positional(s, true, true).map_err(|p| fail(TimeField::Seconds, p))?;
            m + s / 60.0
        }
        (FormatHint::Hms, [h, m, s]) => {
            let h = positional(h, false, false).map_err(|p| fail(TimeField::Hours, p))?;
            let m = positional(m, false, true).map_err(|p| fail(TimeField::Minutes, p))?;
            let s = positional(s, true, true).map_err(|p| fail(TimeField::Seconds, p))?;
            h * 60.0 + m + s / 60.0
        }
        _ => return Err(fail(TimeField::Text, ParseProblem::WrongFieldCount)),
    };

    Duration::from_minutes(minutes).map_err(|_| fail(TimeField::Text, ParseProblem::Malformed))
}

fn positional(field: &str, allow_fraction: bool, below_sixty: bool) -> Result<f64, ParseProblem> {
    let value = number(field, allow_fraction)?;
    if below_sixty && value >= 60.0 {
        return Err(ParseProblem::OutOfRange);
    }
    Ok(value)
}

/// Unsigned decimal: `digits[.digits]`. No exponent, no sign, no inf/nan.
fn number(field: &str, allow_fraction: bool) -> Result<f64, ParseProblem> {
    if field.starts_with('-') {
        return Err(ParseProblem::Negative);
    }
    let (int, frac) = match field.split_once('.') {
        Some((i, f)) if allow_fraction => (i, Some(f)),
        Some(_) => return Err(ParseProblem::Malformed),
        None => (field, None),
    };
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    let valid = !int.is_empty() && all_digits(int) && frac.is_none_or(|f| !f.is_empty() && all_digits(f));
    if !valid {
        return Err(ParseProblem::Malformed);
    }
    field.parse::<f64>().map_err(|_| ParseProblem::Malformed)
}

/// Renders `d`, rounding half away from zero at the last printed digit.
pub fn format_duration(d: Duration, style: TimeStyle) -> String {
    match style {
        TimeStyle::DecimalMinutes => {
            let hundredths = (d.minutes() * 100.0).round() as u64;
            format!("{}.{:02}", hundredths / 100, hundredths % 100)
        }
        TimeStyle::Hms => hms(centiseconds(d)),
        TimeStyle::Ms => {
            let cs = centiseconds(d);
            if cs < CENTIS_PER_HOUR {
                let (m, rem) = (cs / 6000, cs % 6000);
                format!("{}:{:02}.{:02}", m, rem / 100, rem % 100)
            } else {
                hms(cs)
            }
        }
    }
}

fn centiseconds(d: Duration) -> u64 {
    (d.minutes() * CENTIS_PER_MINUTE).round() as u64
}

fn hms(cs: u64) -> String {
    let h = cs / CENTIS_PER_HOUR;
    let rem = cs % CENTIS_PER_HOUR;
    let (m, rem) = (rem / 6000, rem % 6000);
    format!("{}:{:02}:{:02}.{:02}", h, m, rem / 100, rem % 100)
}
