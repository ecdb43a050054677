//! Readout training: scale, embed, drive, harvest states, ridge-fit.

use serde::{Deserialize, Serialize};

use crate::embedding::{embed, DelayWindow, TimeSeries};
use crate::error::{Error, Result};
use crate::linalg::{ridge_solve, DenseMatrix, Vector};
use crate::reservoir::{EsnConfig, Reservoir};

/// Input scaling family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalerKind {
    /// Pass values through unchanged.
    None,
    /// Center on the mean, divide by the population standard deviation.
    Zscore,
    /// Map the observed range onto [-1, 1].
    Minmax,
}

/// Affine transform `y = (x - shift) / scale` with its exact inverse.
///
/// Large-magnitude data (vehicle counts in the hundreds) would pin the tanh
/// activation; fitting a scaler first keeps the reservoir in its useful range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    kind: ScalerKind,
    shift: f64,
    scale: f64,
}

impl Scaler {
    pub fn identity() -> Self {
        Self {
            kind: ScalerKind::None,
            shift: 0.0,
            scale: 1.0,
        }
    }

    /// Fit the requested scaler to a series.
    pub fn fit(series: &TimeSeries, kind: ScalerKind) -> Result<Self> {
        match kind {
            ScalerKind::None => Ok(Self::identity()),
            ScalerKind::Zscore => {
                let samples = series.samples();
                if samples.len() < 2 {
                    return Err(Error::InsufficientData(
                        "zscore scaling needs at least 2 samples".into(),
                    ));
                }
                let n = samples.len() as f64;
                let mean = samples.iter().sum::<f64>() / n;
                let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
                let std = var.sqrt();
                if std == 0.0 {
                    return Err(Error::DegenerateSeries(
                        "constant series cannot be z-scored".into(),
                    ));
                }
                Ok(Self {
                    kind,
                    shift: mean,
                    scale: std,
                })
            }
            ScalerKind::Minmax => {
                let samples = series.samples();
                if samples.len() < 2 {
                    return Err(Error::InsufficientData(
                        "minmax scaling needs at least 2 samples".into(),
                    ));
                }
                let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if max == min {
                    return Err(Error::DegenerateSeries(
                        "constant series has no range to map".into(),
                    ));
                }
                // (x - mid) / halfrange maps [min, max] to [-1, 1].
                Ok(Self {
                    kind,
                    shift: 0.5 * (min + max),
                    scale: 0.5 * (max - min),
                })
            }
        }
    }

    pub fn from_parts(kind: ScalerKind, shift: f64, scale: f64) -> Result<Self> {
        if !(scale != 0.0 && scale.is_finite() && shift.is_finite()) {
            return Err(Error::InvalidArgument("scaler needs finite shift and nonzero scale".into()));
        }
        Ok(Self { kind, shift, scale })
    }

    pub fn kind(&self) -> ScalerKind {
        self.kind
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn transform(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }

    #[inline]
    pub fn inverse(&self, y: f64) -> f64 {
        y * self.scale + self.shift
    }

    pub fn transform_all(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.transform(x)).collect()
    }
}

/// Provenance of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    /// Number of samples consumed (the training length).
    pub n_train: usize,
    /// Embedding dimension used.
    pub m: usize,
    pub seed: u64,
    /// Sampling interval of the training series.
    pub dt: f64,
    /// In-sample NRMSE of the fitted readout, in the scaled domain.
    pub train_nrmse: f64,
}

/// A reservoir with its fitted readout and everything needed to free-run.
#[derive(Debug, Clone)]
pub struct TrainedEsn {
    reservoir: Reservoir,
    w_out: DenseMatrix,
    scaler: Scaler,
    last_window: DelayWindow,
    meta: TrainMeta,
}

impl TrainedEsn {
    pub fn from_parts(
        reservoir: Reservoir,
        w_out: DenseMatrix,
        scaler: Scaler,
        last_window: DelayWindow,
        meta: TrainMeta,
    ) -> Result<Self> {
        if w_out.rows() != 1 || w_out.cols() != reservoir.size() {
            return Err(Error::Dimension(format!(
                "readout {}x{} for reservoir of size {}",
                w_out.rows(),
                w_out.cols(),
                reservoir.size()
            )));
        }
        if last_window.len() != reservoir.input_dim() {
            return Err(Error::Dimension(format!(
                "window length {} but embedding dimension is {}",
                last_window.len(),
                reservoir.input_dim()
            )));
        }
        Ok(Self {
            reservoir,
            w_out,
            scaler,
            last_window,
            meta,
        })
    }

    pub fn reservoir(&self) -> &Reservoir {
        &self.reservoir
    }

    pub fn w_out(&self) -> &DenseMatrix {
        &self.w_out
    }

    pub fn scaler(&self) -> &Scaler {
        &self.scaler
    }

    /// The window of the most recent `m` scaled observations; the first
    /// free-run step consumes it to predict the first unseen sample.
    pub fn last_window(&self) -> &DelayWindow {
        &self.last_window
    }

    pub fn meta(&self) -> &TrainMeta {
        &self.meta
    }

    /// Linear readout of a reservoir state, in the scaled domain.
    pub fn readout(&self, state: &Vector) -> Result<f64> {
        if state.len() != self.w_out.cols() {
            return Err(Error::Dimension(format!(
                "readout of state length {} with {} weights",
                state.len(),
                self.w_out.cols()
            )));
        }
        Ok(self
            .w_out
            .row(0)
            .iter()
            .zip(state.iter())
            .map(|(w, s)| w * s)
            .sum())
    }
}

/// Train the readout on a scalar series.
///
/// The whole series is used: it is scaled, embedded with the configured
/// dimension, and pushed through a freshly generated reservoir starting from
/// the zero state. The state reached after consuming window `i` is paired
/// with the sample one step past that window; the first `washout` pairs are
/// discarded before the ridge fit.
pub fn train(series: &TimeSeries, config: &EsnConfig) -> Result<TrainedEsn> {
    config.validate()?;
    let m = config.embedding_dimension;
    let n_train = series.len();
    if n_train <= m + config.washout {
        return Err(Error::InsufficientData(format!(
            "training needs more than m + washout = {} samples, got {n_train}",
            m + config.washout
        )));
    }

    let scaler = Scaler::fit(series, config.scaler)?;
    let scaled = scaler.transform_all(series.samples());
    let scaled_series = TimeSeries::new(scaled.clone(), series.dt(), series.label())?;
    let (windows, targets) = embed(&scaled_series, m)?;

    let mut reservoir = Reservoir::generate(config)?;
    let (w_out, train_nrmse) = fit_readout(&mut reservoir, &windows, &targets)?;

    let last_window = DelayWindow::new(scaled[n_train - m..].to_vec())?;
    let meta = TrainMeta {
        n_train,
        m,
        seed: config.seed,
        dt: series.dt(),
        train_nrmse,
    };
    TrainedEsn::from_parts(reservoir, w_out, scaler, last_window, meta)
}

/// Drive the reservoir over the windows, pair states with targets, discard
/// the washout, and fit the readout. Split out so tests can exercise the
/// pairing on hand-built reservoirs.
pub(crate) fn fit_readout(
    reservoir: &mut Reservoir,
    windows: &[DelayWindow],
    targets: &[f64],
) -> Result<(DenseMatrix, f64)> {
    debug_assert_eq!(windows.len(), targets.len());
    let washout = reservoir.config().washout;
    let regularization = reservoir.config().regularization;
    if windows.len() <= washout {
        return Err(Error::InsufficientData(format!(
            "washout {washout} leaves no training pairs out of {}",
            windows.len()
        )));
    }

    let states = harvest_states(reservoir, windows)?;
    let n = reservoir.size();
    let t = states.len() - washout;

    let mut state_matrix = DenseMatrix::zeros(n, t);
    for (col, state) in states[washout..].iter().enumerate() {
        for (row, &v) in state.as_slice().iter().enumerate() {
            state_matrix.row_mut(row)[col] = v;
        }
    }
    let target_matrix = DenseMatrix::new(1, t, targets[washout..].to_vec())?;

    let w_out = ridge_solve(&state_matrix, &target_matrix, regularization)?;

    // In-sample quality of the fit, same normalization as the test metric.
    let weights = w_out.row(0);
    let mut err2 = 0.0;
    let mut ref2 = 0.0;
    for (col, &y) in targets[washout..].iter().enumerate() {
        let mut fitted = 0.0;
        for (row, w) in weights.iter().enumerate() {
            fitted += w * state_matrix.row(row)[col];
        }
        err2 += (y - fitted) * (y - fitted);
        ref2 += y * y;
    }
    let train_nrmse = if ref2 > 0.0 {
        (err2 / ref2).sqrt()
    } else {
        // Identically-zero targets: fall back to the unnormalized RMS error.
        (err2 / t as f64).sqrt()
    };

    Ok((w_out, train_nrmse))
}

/// Drive the reservoir over the training windows. With state noise enabled,
/// the recorded copy of each state is jittered while the recursion itself
/// propagates clean: for the linear readout fit this is the classical
/// noise-injection regularizer (in expectation it adds `T sigma^2` to the
/// Gram diagonal), which pulls the readout norm down and with it the
/// closed-loop error amplification.
fn harvest_states(reservoir: &mut Reservoir, windows: &[DelayWindow]) -> Result<Vec<Vector>> {
    let noise_std = reservoir.config().state_noise_std;
    if noise_std == 0.0 {
        return reservoir.drive(windows);
    }

    use rand_distr::{Distribution, Normal};
    let mut rng = crate::reservoir::substream(
        reservoir.config().seed,
        crate::reservoir::STREAM_STATE_NOISE,
    );
    let noise = Normal::new(0.0, noise_std)
        .map_err(|e| Error::InvalidArgument(format!("state noise: {e}")))?;

    let mut states = Vec::with_capacity(windows.len());
    for window in windows {
        let state = reservoir.step(window.as_ref())?;
        let jittered: Vec<f64> = state.iter().map(|&v| v + noise.sample(&mut rng)).collect();
        states.push(Vector::new(jittered)?);
    }
    Ok(states)
}
