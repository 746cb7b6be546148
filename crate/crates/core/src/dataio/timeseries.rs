//! Hourly CSV ingestion and load scaling.

use crate::model::Series3;
use chrono::{Datelike, Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path} line {line}: column '{column}' is not numeric: '{value}'")]
    NonNumeric {
        path: String,
        line: usize,
        column: String,
        value: String,
    },
    #[error("{path} line {line}: bad timestamp '{value}'")]
    BadTimestamp {
        path: String,
        line: usize,
        value: String,
    },
    #[error("{path}: missing hour, expected {expected}")]
    MissingHour { path: String, expected: String },
    #[error("{path}: missing column '{column}'")]
    MissingColumn { path: String, column: String },
    #[error("{path}: expected {want} hourly values, got {got}")]
    WrongLength {
        path: String,
        want: usize,
        got: usize,
    },
    #[error("{path}: series length {got} is not a whole number of days")]
    RaggedDays { path: String, got: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("write failed for {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Which CSV columns hold the timestamp and the value.
#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub timestamp: String,
    pub value: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            value: "value".into(),
        }
    }
}

impl ColumnSpec {
    pub fn value_column(name: &str) -> Self {
        Self {
            value: name.into(),
            ..Self::default()
        }
    }
}

/// A contiguous hourly series. February 29 is dropped on ingestion so every
/// year spans 8,760 hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSeries {
    pub year: i32,
    pub column: String,
    pub values: Vec<f64>,
    pub dropped_leap_day: bool,
}

impl RawSeries {
    pub fn n_days(&self) -> usize {
        self.values.len() / 24
    }

    pub fn day(&self, j: usize) -> &[f64] {
        &self.values[j * 24..(j + 1) * 24]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

const TS_FORMAT: &str = "%Y-%m-%d %H:%M";

/// Read one hourly series. Gaps, unparsable cells, duplicate or out-of-order
/// hours, and (when `expected_hours` is given) wrong lengths are all distinct
/// errors; nothing is interpolated.
pub fn load_timeseries(
    path: impl AsRef<Path>,
    columns: &ColumnSpec,
    expected_hours: Option<usize>,
) -> Result<RawSeries, DataError> {
    let path_str = path.as_ref().display().to_string();
    let io_err = |source| DataError::Io {
        path: path_str.clone(),
        source,
    };
    let mut reader = csv::Reader::from_path(path.as_ref()).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => {
            if let csv::ErrorKind::Io(io) = e.into_kind() {
                io_err(io)
            } else {
                unreachable!()
            }
        }
        _ => DataError::Csv {
            path: path_str.clone(),
            source: e,
        },
    })?;
    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?
        .clone();
    let col_index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn {
                path: path_str.clone(),
                column: name.to_string(),
            })
    };
    let ts_col = col_index(&columns.timestamp)?;
    let val_col = col_index(&columns.value)?;

    let mut values = Vec::new();
    let mut expected_ts: Option<NaiveDateTime> = None;
    let mut year: Option<i32> = None;
    let mut leap_days = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let record = record.map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?;
        let ts_text = record.get(ts_col).unwrap_or("");
        let ts = NaiveDateTime::parse_from_str(ts_text, TS_FORMAT).map_err(|_| {
            DataError::BadTimestamp {
                path: path_str.clone(),
                line,
                value: ts_text.to_string(),
            }
        })?;
        if let Some(expected) = expected_ts {
            if ts != expected {
                return Err(DataError::MissingHour {
                    path: path_str.clone(),
                    expected: expected.format(TS_FORMAT).to_string(),
                });
            }
        } else {
            year = Some(ts.year());
        }
        expected_ts = Some(ts + Duration::hours(1));
        let raw_value = record.get(val_col).unwrap_or("");
        let value: f64 = raw_value.trim().parse().map_err(|_| DataError::NonNumeric {
            path: path_str.clone(),
            line,
            column: columns.value.clone(),
            value: raw_value.to_string(),
        })?;
        if ts.month() == 2 && ts.day() == 29 {
            leap_days.push(values.len());
        }
        values.push(value);
    }

    // Drop February 29 so downstream code always sees 365-day years.
    let dropped_leap_day = !leap_days.is_empty();
    if dropped_leap_day {
        let drop: std::collections::HashSet<usize> = leap_days.into_iter().collect();
        values = values
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, v)| v)
            .collect();
    }

    if values.len() % 24 != 0 {
        return Err(DataError::RaggedDays {
            path: path_str,
            got: values.len(),
        });
    }
    if let Some(want) = expected_hours {
        if values.len() != want {
            return Err(DataError::WrongLength {
                path: path_str,
                want,
                got: values.len(),
            });
        }
    }
    Ok(RawSeries {
        year: year.unwrap_or_default(),
        column: columns.value.clone(),
        values,
        dropped_leap_day,
    })
}

/// Per-year peak load (MW) from the first projected year onward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakProjection {
    pub start_year: i32,
    pub peaks: Vec<f64>,
}

impl PeakProjection {
    pub fn peak_for(&self, year: i32) -> Option<f64> {
        let offset = year.checked_sub(self.start_year)?;
        if offset < 0 {
            return None;
        }
        self.peaks.get(offset as usize).copied()
    }
}

/// Read a `year,peak_mw` projection table.
pub fn load_peak_projection(path: impl AsRef<Path>) -> Result<PeakProjection, DataError> {
    let rows = read_year_value(path, "peak_mw")?;
    if rows.iter().any(|&(_, v)| v <= 0.0) {
        return Err(DataError::Invalid("peak projections must be positive".into()));
    }
    Ok(PeakProjection {
        start_year: rows.first().map(|&(y, _)| y).unwrap_or_default(),
        peaks: rows.iter().map(|&(_, v)| v).collect(),
    })
}

/// Read a `year,<column>` table into consecutive (year, value) rows.
pub fn read_year_value(
    path: impl AsRef<Path>,
    value_column: &str,
) -> Result<Vec<(i32, f64)>, DataError> {
    let path_str = path.as_ref().display().to_string();
    let mut reader = csv::Reader::from_path(path.as_ref()).map_err(|e| DataError::Csv {
        path: path_str.clone(),
        source: e,
    })?;
    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?
        .clone();
    let year_col = headers
        .iter()
        .position(|h| h == "year")
        .ok_or_else(|| DataError::MissingColumn {
            path: path_str.clone(),
            column: "year".into(),
        })?;
    let val_col = headers
        .iter()
        .position(|h| h == value_column)
        .ok_or_else(|| DataError::MissingColumn {
            path: path_str.clone(),
            column: value_column.to_string(),
        })?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?;
        let parse = |col: usize, name: &str| -> Result<f64, DataError> {
            let raw = record.get(col).unwrap_or("");
            raw.trim().parse().map_err(|_| DataError::NonNumeric {
                path: path_str.clone(),
                line,
                column: name.to_string(),
                value: raw.to_string(),
            })
        };
        let year = parse(year_col, "year")? as i32;
        let value = parse(val_col, value_column)?;
        if let Some(&(prev, _)) = out.last() {
            if year != prev + 1 {
                return Err(DataError::Invalid(format!(
                    "{path_str}: years must be consecutive, got {year} after {prev}"
                )));
            }
        }
        out.push((year, value));
    }
    Ok(out)
}

/// Scale a base-year hourly profile onto every planning period so that the
/// scaled maximum of period `n` equals the projected peak exactly. The
/// intra-year shape is preserved: every hour is multiplied by the same
/// factor within a year.
pub fn scale_load_by_peak(
    base: &RawSeries,
    projections: &PeakProjection,
    start_year: i32,
    n_periods: usize,
) -> Result<Series3<f64>, DataError> {
    let n_days = base.n_days();
    let base_max = base.max();
    if !(base_max > 0.0) {
        return Err(DataError::Invalid(
            "base load peak must be positive to scale by peak".into(),
        ));
    }
    let mut factors = Vec::with_capacity(n_periods);
    for n in 0..n_periods {
        let year = start_year + n as i32;
        let peak = projections
            .peak_for(year)
            .ok_or_else(|| DataError::Invalid(format!("no peak projection for year {year}")))?;
        factors.push(peak);
    }
    Ok(Series3::from_fn(n_periods, n_days, 24, |n, j, k| {
        // Dividing first makes the peak hour land exactly on the projection.
        base.values[j * 24 + k] / base_max * factors[n]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "timestamp,load_mw").unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    fn day_lines(date: &str, base: f64) -> Vec<String> {
        (0..24)
            .map(|h| format!("{date} {h:02}:00,{}", base + h as f64))
            .collect()
    }

    #[test]
    fn reads_a_single_day() {
        let lines = day_lines("2024-03-01", 10.0);
        let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
        let f = write_csv(&refs);
        let s = load_timeseries(f.path(), &ColumnSpec::value_column("load_mw"), Some(24)).unwrap();
        assert_eq!(s.values.len(), 24);
        assert_eq!(s.values[3], 13.0);
        assert_eq!(s.year, 2024);
    }

    #[test]
    fn gap_is_a_missing_hour_error_naming_the_timestamp() {
        let mut lines = day_lines("2024-03-01", 10.0);
        lines.remove(13);
        let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
        let f = write_csv(&refs);
        let err = load_timeseries(f.path(), &ColumnSpec::value_column("load_mw"), None).unwrap_err();
        match err {
            DataError::MissingHour { expected, .. } => {
                assert_eq!(expected, "2024-03-01 13:00");
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn non_numeric_cell_is_distinct() {
        let lines = vec!["2024-03-01 00:00,abc"];
        let f = write_csv(&lines);
        let err = load_timeseries(f.path(), &ColumnSpec::value_column("load_mw"), None).unwrap_err();
        assert!(matches!(err, DataError::NonNumeric { line: 2, .. }));
    }

    #[test]
    fn wrong_length_is_distinct() {
        let lines = day_lines("2024-03-01", 10.0);
        let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
        let f = write_csv(&refs);
        let err =
            load_timeseries(f.path(), &ColumnSpec::value_column("load_mw"), Some(48)).unwrap_err();
        assert!(matches!(err, DataError::WrongLength { want: 48, got: 24, .. }));
    }

    #[test]
    fn leap_day_is_dropped() {
        let mut lines = day_lines("2024-02-28", 10.0);
        lines.extend(day_lines("2024-02-29", 99.0));
        lines.extend(day_lines("2024-03-01", 20.0));
        let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
        let f = write_csv(&refs);
        let s = load_timeseries(f.path(), &ColumnSpec::value_column("load_mw"), Some(48)).unwrap();
        assert!(s.dropped_leap_day);
        assert_eq!(s.values.len(), 48);
        assert!(s.values.iter().all(|&v| v < 90.0));
    }

    #[test]
    fn scaling_preserves_shape_and_hits_the_peak() {
        let base = RawSeries {
            year: 2024,
            column: "load_mw".into(),
            values: (0..48).map(|h| 30.0 + (h % 24) as f64 + if h >= 24 { 3.0 } else { 0.0 }).collect(),
            dropped_leap_day: false,
        };
        assert_eq!(base.max(), 56.0);
        let proj = PeakProjection {
            start_year: 2025,
            peaks: vec![62.0, 64.0],
        };
        let scaled = scale_load_by_peak(&base, &proj, 2025, 2).unwrap();
        let max0 = (0..2)
            .flat_map(|j| (0..24).map(move |k| (j, k)))
            .map(|(j, k)| scaled.at(0, j, k))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max0, 62.0);
        // Constant ratio within a year.
        let r = scaled.at(0, 0, 5) / base.values[5];
        for j in 0..2 {
            for k in 0..24 {
                let ratio = scaled.at(0, j, k) / base.values[j * 24 + k];
                assert!((ratio - r).abs() < 1e-12);
            }
        }
        // Identity when the projection equals the base peak.
        let proj_id = PeakProjection {
            start_year: 2025,
            peaks: vec![56.0],
        };
        let same = scale_load_by_peak(&base, &proj_id, 2025, 1).unwrap();
        for j in 0..2 {
            for k in 0..24 {
                assert!((same.at(0, j, k) - base.values[j * 24 + k]).abs() < 1e-12);
            }
        }
    }
}
