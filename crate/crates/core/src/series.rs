//! Price series loading, validation and transforms.
//!
//! Every statistic in this crate works on observation indices. Dates are carried
//! along only so results can be reported against the calendar.

use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::fmt17;

pub const DEFAULT_DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Raw,
    Log,
}

/// An ordered, validated sequence of dated observations.
///
/// Dates are strictly increasing, values are finite and there are at least two
/// observations. The type is immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    label: String,
    transform: Transform,
}

/// Column and format settings for [`load_csv`].
#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub date_column: String,
    pub value_column: String,
    pub date_format: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            date_column: "date".into(),
            value_column: "value".into(),
            date_format: DEFAULT_DATE_FORMAT.into(),
        }
    }
}

/// First date used for synthetic series; observation `i` is dated `i` days later.
pub fn synthetic_epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch")
}

impl TimeSeries {
    pub fn new(
        dates: Vec<NaiveDate>,
        values: Vec<f64>,
        label: impl Into<String>,
        transform: Transform,
    ) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                dates: dates.len(),
                values: values.len(),
            });
        }
        if dates.len() < 2 {
            return Err(Error::TooShort(dates.len()));
        }
        for w in dates.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateDate(w[1]));
            }
            if w[0] > w[1] {
                return Err(Error::Unordered(w[1]));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(dates[i]));
        }
        Ok(TimeSeries {
            dates,
            values,
            label: label.into(),
            transform,
        })
    }

    /// Builds a series dated by consecutive days from [`synthetic_epoch`], so the
    /// day ordinal equals the observation index.
    pub fn from_values(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let epoch = synthetic_epoch();
        let dates = (0..values.len())
            .map(|i| epoch + chrono::Duration::days(i as i64))
            .collect();
        TimeSeries::new(dates, values, label, Transform::Raw)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Returns a series with the same dates and `f` applied to each value.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        TimeSeries::new(
            self.dates.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
            self.label.clone(),
            self.transform,
        )
    }

    /// Natural logarithm of every value.
    pub fn to_log(&self) -> Result<Self> {
        if self.transform == Transform::Log {
            return Err(Error::AlreadyLog);
        }
        if let Some(i) = self.values.iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositive {
                date: self.dates[i],
                value: self.values[i],
            });
        }
        Ok(TimeSeries {
            dates: self.dates.clone(),
            values: self.values.iter().map(|v| v.ln()).collect(),
            label: self.label.clone(),
            transform: Transform::Log,
        })
    }

    /// Contiguous sub-series `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::BadSlice {
                start,
                end,
                len: self.len(),
            });
        }
        // A one-observation slice is still a valid index range, but not a series.
        TimeSeries::new(
            self.dates[start..end].to_vec(),
            self.values[start..end].to_vec(),
            self.label.clone(),
            self.transform,
        )
    }

    /// Writes the series as `date,value` CSV with 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record(["date", "value"]).map_err(csv_err)?;
        for (d, v) in self.dates.iter().zip(&self.values) {
            w.write_record([d.format(DEFAULT_DATE_FORMAT).to_string(), fmt17(*v)])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Loads a series from a CSV file with a header row.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(file, opts, label)
}

/// Parses CSV from any reader. Rows are sorted by date; unparseable or empty
/// cells are errors rather than being skipped.
pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions, label: impl Into<String>) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let date_idx = find(&opts.date_column)?;
    let value_idx = find(&opts.value_column)?;

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        // 1-based data row number, header excluded
        let row = i + 1;
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let raw_date = record.get(date_idx).unwrap_or("");
        let raw_value = record.get(value_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(raw_date, &opts.date_format).map_err(|_| {
            Error::BadDate {
                row,
                value: raw_date.to_string(),
                format: opts.date_format.clone(),
            }
        })?;
        let value: f64 = raw_value.parse().map_err(|_| Error::BadValue {
            row,
            value: raw_value.to_string(),
        })?;
        if !value.is_finite() {
            return Err(Error::BadValue {
                row,
                value: raw_value.to_string(),
            });
        }
        rows.push((date, value));
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    rows.sort_by_key(|&(d, _)| d);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate(w[0].0));
    }
    let (dates, values) = rows.into_iter().unzip();
    TimeSeries::new(dates, values, label, Transform::Raw)
}
