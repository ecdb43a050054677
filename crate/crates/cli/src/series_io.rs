//! Series and forecast CSV files.
//!
//! The on-disk format is `t,value` rows after optional `#` comment lines and
//! an optional header. Floats are written with Rust's shortest-round-trip
//! formatting, so write → read is lossless.

use std::fs;
use std::path::Path;

use delay_esn::embedding::TimeSeries;
use delay_esn::prediction::Forecast;

use crate::error::{CliError, CliResult};

// Relative non-uniformity tolerated in the time column.
const SPACING_TOL: f64 = 1e-6;

/// Write a series with provenance comment lines.
pub fn write_series(path: &Path, series: &TimeSeries, comments: &[(String, String)]) -> CliResult<()> {
    let mut out = String::new();
    for (key, value) in comments {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    out.push_str("t,value\n");
    for (k, v) in series.samples().iter().enumerate() {
        out.push_str(&format!("{},{}\n", k as f64 * series.dt(), v));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Write a forecast, optionally alongside the matching truth values.
pub fn write_forecast(path: &Path, forecast: &Forecast, truth: Option<&[f64]>) -> CliResult<()> {
    let mut out = String::new();
    out.push_str(&format!("# start_index = {}\n", forecast.start_index));
    out.push_str(&format!("# dt = {}\n", forecast.dt));
    if truth.is_some() {
        out.push_str("t,prediction,truth\n");
    } else {
        out.push_str("t,prediction\n");
    }
    for (k, p) in forecast.predictions.iter().enumerate() {
        let t = (forecast.start_index + k) as f64 * forecast.dt;
        match truth {
            Some(tr) => out.push_str(&format!("{t},{p},{}\n", tr[k])),
            None => out.push_str(&format!("{t},{p}\n")),
        }
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Read a series back: `t,value` pairs or a single `value` column, `#`
/// comments and one optional header line allowed. The time column must be
/// uniformly spaced; single-column files get `dt = 1`.
pub fn ingest_csv(path: &Path) -> CliResult<TimeSeries> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;

    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut row_lines: Vec<usize> = Vec::new();
    let mut columns: Option<usize> = None;
    let mut header_allowed = true;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields
            .iter()
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();

        let Some(nums) = parsed else {
            if header_allowed {
                // A single non-numeric line before any data is the header.
                header_allowed = false;
                continue;
            }
            return Err(CliError::format(path, line_no, format!("non-numeric row '{line}'")));
        };
        header_allowed = false;

        match columns {
            None => {
                if nums.len() != 1 && nums.len() != 2 {
                    return Err(CliError::format(
                        path,
                        line_no,
                        format!("expected 1 or 2 columns, found {}", nums.len()),
                    ));
                }
                columns = Some(nums.len());
            }
            Some(c) if c != nums.len() => {
                return Err(CliError::format(
                    path,
                    line_no,
                    format!("expected {c} columns, found {}", nums.len()),
                ));
            }
            _ => {}
        }

        if nums.len() == 2 {
            times.push(nums[0]);
            values.push(nums[1]);
        } else {
            values.push(nums[0]);
        }
        row_lines.push(line_no);
    }

    if values.is_empty() {
        return Err(CliError::format(path, text.lines().count().max(1), "no data rows"));
    }

    let dt = if times.len() < 2 {
        1.0
    } else {
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(CliError::format(path, row_lines[1], "time column must be increasing"));
        }
        for (i, pair) in times.windows(2).enumerate() {
            let step = pair[1] - pair[0];
            if (step - dt).abs() > SPACING_TOL * dt.abs() {
                return Err(CliError::format(
                    path,
                    row_lines[i + 1],
                    format!("non-uniform spacing: {step} vs {dt}"),
                ));
            }
        }
        dt
    };

    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into());
    TimeSeries::new(values, dt, label).map_err(CliError::from)
}
