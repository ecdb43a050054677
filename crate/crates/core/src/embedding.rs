//! Delay-coordinate windows over scalar series.
//!
//! A window holds the `m` most recent samples ordered oldest → newest; the
//! training target paired with a window is the sample one step past its
//! newest entry. During closed-loop prediction the window slides by dropping
//! its oldest value and appending the newest prediction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled scalar series with its sampling interval and a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    samples: Vec<f64>,
    dt: f64,
    label: String,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, dt: f64, label: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientData("series must not be empty".into()));
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("series samples".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument("sampling interval must be positive".into()));
        }
        Ok(Self {
            samples,
            dt,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The first `n` samples as a new series.
    pub fn head(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::InsufficientData(format!(
                "cannot take {n} samples from a series of length {}",
                self.len()
            )));
        }
        Self::new(self.samples[..n].to_vec(), self.dt, self.label.clone())
    }
}

/// Sliding window of `m` consecutive samples, oldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayWindow {
    values: Vec<f64>,
}

impl DelayWindow {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("delay window must not be empty".into()));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("delay window values".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn newest(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Drop the oldest value and append `new_value` as the newest.
    pub fn shifted(&self, new_value: f64) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        values.extend_from_slice(&self.values[1..]);
        values.push(new_value);
        Self { values }
    }
}

impl AsRef<[f64]> for DelayWindow {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Build all delay windows of length `m` with their one-step-ahead targets.
///
/// For samples `x(0) .. x(N-1)` this yields `N - m` pairs: window `i` is
/// `[x(i), ..., x(i+m-1)]` and its target is `x(i+m)`.
pub fn embed(series: &TimeSeries, m: usize) -> Result<(Vec<DelayWindow>, Vec<f64>)> {
    embed_samples(series.samples(), m)
}

pub(crate) fn embed_samples(samples: &[f64], m: usize) -> Result<(Vec<DelayWindow>, Vec<f64>)> {
    if m == 0 {
        return Err(Error::InvalidArgument("embedding dimension must be at least 1".into()));
    }
    let n = samples.len();
    if n <= m {
        return Err(Error::InsufficientData(format!(
            "need more than m = {m} samples, got {n}"
        )));
    }
    let mut windows = Vec::with_capacity(n - m);
    let mut targets = Vec::with_capacity(n - m);
    for i in 0..n - m {
        windows.push(DelayWindow {
            values: samples[i..i + m].to_vec(),
        });
        targets.push(samples[i + m]);
    }
    Ok((windows, targets))
}
