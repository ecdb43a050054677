//! Closed-loop and teacher-forced forecasting.

use crate::embedding::{embed, TimeSeries};
use crate::error::{Error, Result};
use crate::training::TrainedEsn;

/// A multi-step forecast in the original (unscaled) data domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    /// One value per requested step.
    pub predictions: Vec<f64>,
    /// Sampling interval, copied from the training series.
    pub dt: f64,
    /// Index on the training timeline of the first predicted sample.
    pub start_index: usize,
}

/// Free-run (closed-loop) prediction for `horizon` steps.
///
/// Starting from the post-training reservoir state and the window of the
/// last `m` scaled observations, each step feeds the current window to the
/// reservoir, reads out the next scalar, and slides the window by that
/// prediction. Feedback stays in the scaled domain; the inverse transform is
/// applied only to the returned values. The input model is untouched — the
/// run operates on private copies of the state and window.
pub fn free_run(trained: &TrainedEsn, horizon: usize) -> Result<Forecast> {
    let mut reservoir = trained.reservoir().clone();
    let mut window = trained.last_window().clone();
    let mut predictions = Vec::with_capacity(horizon);

    for step in 0..horizon {
        let state = reservoir.step(window.as_ref())?;
        let y = trained.readout(state)?;
        if !y.is_finite() {
            return Err(Error::NonFinite(format!("free-run prediction at step {step}")));
        }
        predictions.push(trained.scaler().inverse(y));
        window = window.shifted(y);
    }

    Ok(Forecast {
        predictions,
        dt: trained.meta().dt,
        start_index: trained.meta().n_train,
    })
}

/// One-step-ahead predictions over true delay windows.
///
/// Diagnostic mode: the reservoir is restarted from the zero state (as in
/// training) and driven by windows built from `truth`, so readout quality
/// can be judged without feedback divergence. Prediction `k` estimates
/// `truth` sample `m + k`.
pub fn teacher_forced_run(trained: &TrainedEsn, truth: &TimeSeries, horizon: usize) -> Result<Forecast> {
    let m = trained.reservoir().input_dim();
    if horizon == 0 {
        return Ok(Forecast {
            predictions: Vec::new(),
            dt: truth.dt(),
            start_index: m,
        });
    }
    if truth.len() < m + horizon {
        return Err(Error::InsufficientData(format!(
            "teacher forcing over horizon {horizon} needs at least {} samples, got {}",
            m + horizon,
            truth.len()
        )));
    }

    let scaled = trained.scaler().transform_all(truth.samples());
    let scaled_series = TimeSeries::new(scaled, truth.dt(), truth.label())?;
    let (windows, _) = embed(&scaled_series, m)?;

    let mut reservoir = trained.reservoir().clone();
    reservoir.reset_state();

    let mut predictions = Vec::with_capacity(horizon);
    for window in windows.iter().take(horizon) {
        let state = reservoir.step(window.as_ref())?;
        let y = trained.readout(state)?;
        predictions.push(trained.scaler().inverse(y));
    }

    Ok(Forecast {
        predictions,
        dt: truth.dt(),
        start_index: m,
    })
}
