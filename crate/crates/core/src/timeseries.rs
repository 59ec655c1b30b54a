//! Date-indexed series, aligned panels and the elementary transforms the
//! estimators consume.

use std::collections::BTreeSet;
use std::fmt;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named daily series. Dates are strictly increasing and every value is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    name: String,
    units: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl Series {
    pub fn new(
        name: impl Into<String>,
        units: impl Into<String>,
        dates: Vec<NaiveDate>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let name = name.into();
        if dates.len() != values.len() {
            return Err(Error::InvalidSeries {
                name,
                reason: format!("{} dates but {} values", dates.len(), values.len()),
            });
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSeries {
                name,
                reason: format!("dates not strictly increasing at {}", w[1]),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries {
                name,
                reason: format!("non-finite value on {}", dates[i]),
            });
        }
        Ok(Self {
            name,
            units: units.into(),
            dates,
            values,
        })
    }

    /// Series on consecutive calendar days starting at `start`.
    pub fn from_values(name: impl Into<String>, start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let dates = (0..values.len())
            .map(|i| start + Duration::days(i as i64))
            .collect();
        Self::new(name, "", dates, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
        self.dates
            .binary_search(&date)
            .ok()
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Keep only the observations whose date is in `dates`.
    fn restrict(&self, dates: &BTreeSet<NaiveDate>) -> Series {
        let (d, v) = self.iter().filter(|(d, _)| dates.contains(d)).unzip();
        Series {
            name: self.name.clone(),
            units: self.units.clone(),
            dates: d,
            values: v,
        }
    }

    /// Restrict to the closed date window `[start, end]`.
    pub fn window(&self, start: NaiveDate, end: NaiveDate) -> Series {
        let (d, v) = self
            .iter()
            .filter(|(d, _)| *d >= start && *d <= end)
            .unzip();
        Series {
            name: self.name.clone(),
            units: self.units.clone(),
            dates: d,
            values: v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Level,
    Log,
    /// `ln(1 + x)`, for count series that contain zero days.
    Log1p,
}

impl Transform {
    pub fn tag(self) -> &'static str {
        match self {
            Transform::Level => "level",
            Transform::Log => "log",
            Transform::Log1p => "log1p",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "level" => Some(Transform::Level),
            "log" => Some(Transform::Log),
            "log1p" => Some(Transform::Log1p),
            _ => None,
        }
    }

    pub fn inverse(self, v: f64) -> f64 {
        match self {
            Transform::Level => v,
            Transform::Log => v.exp(),
            Transform::Log1p => v.exp_m1(),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Dependent,
    Regressor,
}

/// One panel column. `shift` records a shift that has already been applied to
/// the stored values; consumers must not apply it again.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub units: String,
    pub values: Vec<f64>,
    pub transform: Transform,
    pub shift: i64,
    pub role: Role,
}

/// Panel of columns on a shared calendar with no interior gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    calendar: Vec<NaiveDate>,
    columns: Vec<Column>,
}

impl Dataset {
    pub fn new(calendar: Vec<NaiveDate>, columns: Vec<Column>) -> Result<Self> {
        if calendar.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Data("calendar dates must be strictly increasing".into()));
        }
        for c in &columns {
            if c.values.len() != calendar.len() {
                return Err(Error::Data(format!(
                    "column `{}` has {} values for a {}-date calendar",
                    c.name,
                    c.values.len(),
                    calendar.len()
                )));
            }
            if c.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Data(format!("column `{}` has non-finite values", c.name)));
            }
        }
        let deps = columns.iter().filter(|c| c.role == Role::Dependent).count();
        if deps != 1 {
            return Err(Error::Data(format!(
                "panel needs exactly one dependent column, found {deps}"
            )));
        }
        let mut names = BTreeSet::new();
        for c in &columns {
            if !names.insert(c.name.as_str()) {
                return Err(Error::Data(format!("duplicate column name `{}`", c.name)));
            }
        }
        Ok(Self { calendar, columns })
    }

    /// Build a panel from raw vectors on a consecutive-day calendar. The first
    /// column is the dependent variable.
    pub fn from_columns(start: NaiveDate, columns: Vec<(&str, Vec<f64>)>) -> Result<Self> {
        let n = columns.first().map(|c| c.1.len()).unwrap_or(0);
        let calendar = (0..n).map(|i| start + Duration::days(i as i64)).collect();
        let columns = columns
            .into_iter()
            .enumerate()
            .map(|(i, (name, values))| Column {
                name: name.to_string(),
                units: String::new(),
                values,
                transform: Transform::Level,
                shift: 0,
                role: if i == 0 { Role::Dependent } else { Role::Regressor },
            })
            .collect();
        Self::new(calendar, columns)
    }

    pub fn calendar(&self) -> &[NaiveDate] {
        &self.calendar
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.calendar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.calendar.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn dependent(&self) -> &Column {
        self.columns
            .iter()
            .find(|c| c.role == Role::Dependent)
            .expect("dataset invariant: one dependent column")
    }

    pub fn regressors(&self) -> impl Iterator<Item = &Column> {
        self.columns.iter().filter(|c| c.role == Role::Regressor)
    }

    /// Column as a standalone series (values as stored).
    pub fn series(&self, name: &str) -> Option<Series> {
        self.column(name).map(|c| Series {
            name: c.name.clone(),
            units: c.units.clone(),
            dates: self.calendar.clone(),
            values: c.values.clone(),
        })
    }

    pub fn set_dependent(&mut self, name: &str) -> Result<()> {
        if self.column(name).is_none() {
            return Err(Error::Data(format!("no column named `{name}`")));
        }
        for c in &mut self.columns {
            c.role = if c.name == name { Role::Dependent } else { Role::Regressor };
        }
        Ok(())
    }

    /// Replace a column's values in place, e.g. to rescale a regressor.
    pub fn map_column(&mut self, name: &str, f: impl Fn(f64) -> f64) -> Result<()> {
        let col = self
            .columns
            .iter_mut()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Data(format!("no column named `{name}`")))?;
        for v in &mut col.values {
            *v = f(*v);
        }
        Ok(())
    }

    pub fn column_mut(&mut self, name: &str) -> Option<&mut Column> {
        self.columns.iter_mut().find(|c| c.name == name)
    }

    /// All columns re-expressed as series, in panel order.
    pub fn to_series(&self) -> Vec<Series> {
        self.columns
            .iter()
            .map(|c| self.series(&c.name).expect("own column"))
            .collect()
    }
}

/// Merge series onto a common calendar.
///
/// With `intersect` the calendar is the set of dates present in every
/// series. Without it every series must already share one calendar.
/// The first series becomes the dependent column.
pub fn align(series_list: &[Series], intersect: bool) -> Result<Dataset> {
    if series_list.len() < 2 {
        return Err(Error::Empty("align needs at least two series".into()));
    }
    if let Some(s) = series_list.iter().find(|s| s.is_empty()) {
        return Err(Error::Empty(format!("series `{}` is empty", s.name)));
    }

    let mut common: BTreeSet<NaiveDate> = series_list[0].dates.iter().copied().collect();
    for s in &series_list[1..] {
        if intersect {
            let dates: BTreeSet<NaiveDate> = s.dates.iter().copied().collect();
            common = common.intersection(&dates).copied().collect();
            if common.is_empty() {
                return Err(Error::Alignment {
                    series: s.name.clone(),
                });
            }
        } else if s.dates != series_list[0].dates {
            return Err(Error::Alignment {
                series: s.name.clone(),
            });
        }
    }

    let calendar: Vec<NaiveDate> = common.iter().copied().collect();
    let columns = series_list
        .iter()
        .enumerate()
        .map(|(i, s)| Column {
            name: s.name.clone(),
            units: s.units.clone(),
            values: s.restrict(&common).values,
            transform: Transform::Level,
            shift: 0,
            role: if i == 0 { Role::Dependent } else { Role::Regressor },
        })
        .collect();
    Dataset::new(calendar, columns)
}

pub fn transform(series: &Series, tag: Transform) -> Result<Series> {
    let f: fn(f64) -> f64 = match tag {
        Transform::Level => return Ok(series.clone()),
        Transform::Log => f64::ln,
        Transform::Log1p => f64::ln_1p,
    };
    let floor = if tag == Transform::Log { 0.0 } else { -1.0 };
    if let Some((date, value)) = series.iter().find(|(_, v)| *v <= floor) {
        return Err(Error::Transform {
            series: series.name.clone(),
            date,
            value,
        });
    }
    Ok(Series {
        name: format!("{}_{}", series.name, tag.tag()),
        units: format!("{}({})", tag.tag(), series.units),
        dates: series.dates.clone(),
        values: series.values.iter().map(|&v| f(v)).collect(),
    })
}

/// Output at position `t` takes the input value at position `t + k`.
/// Positive `k` leads the series, negative `k` lags it; `|k|` observations
/// are dropped.
pub fn shift(series: &Series, k: i64) -> Result<Series> {
    let n = series.len();
    if k.unsigned_abs() as usize >= n {
        return Err(Error::Shift {
            series: series.name.clone(),
            shift: k,
            len: n,
        });
    }
    let m = k.unsigned_abs() as usize;
    let (dates, values) = if k >= 0 {
        (series.dates[..n - m].to_vec(), series.values[m..].to_vec())
    } else {
        (series.dates[m..].to_vec(), series.values[..n - m].to_vec())
    };
    Ok(Series {
        name: series.name.clone(),
        units: series.units.clone(),
        dates,
        values,
    })
}

pub fn diff(series: &Series) -> Result<Series> {
    if series.len() < 2 {
        return Err(Error::Diff {
            series: series.name.clone(),
            len: series.len(),
        });
    }
    Ok(Series {
        name: format!("d_{}", series.name),
        units: series.units.clone(),
        dates: series.dates[1..].to_vec(),
        values: series.values.windows(2).map(|w| w[1] - w[0]).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub name: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation, divisor `n - 1`.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub columns: Vec<ColumnSummary>,
}

impl SummaryStats {
    pub fn get(&self, name: &str) -> Option<&ColumnSummary> {
        self.columns.iter().find(|c| c.name == name)
    }
}

pub fn summarize_values(name: &str, values: &[f64]) -> Result<ColumnSummary> {
    if values.is_empty() {
        return Err(Error::Empty(format!("column `{name}` has no rows")));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let std = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    // keep min <= mean <= max under rounding
    let mean = mean.clamp(min, max);
    Ok(ColumnSummary {
        name: name.to_string(),
        n,
        min,
        max,
        mean,
        std,
    })
}

pub fn summarize(dataset: &Dataset) -> Result<SummaryStats> {
    if dataset.is_empty() || dataset.columns.is_empty() {
        return Err(Error::Empty("cannot summarize an empty panel".into()));
    }
    let columns = dataset
        .columns
        .iter()
        .map(|c| summarize_values(&c.name, &c.values))
        .collect::<Result<_>>()?;
    Ok(SummaryStats { columns })
}

/// Lag-`lag` sample autocorrelation.
pub fn autocorrelation(values: &[f64], lag: usize) -> f64 {
    let n = values.len();
    if lag >= n {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let denom: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    if denom == 0.0 {
        return 0.0;
    }
    let num: f64 = (lag..n)
        .map(|t| (values[t] - mean) * (values[t - lag] - mean))
        .sum();
    num / denom
}
