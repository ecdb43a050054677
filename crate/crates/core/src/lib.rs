//! Echo-state networks driven by delay-embedded scalar observations.
//!
//! A scalar time series sampled from a higher-dimensional dynamical system is
//! unfolded into sliding delay windows, a fixed random reservoir is driven by
//! those windows, and a linear readout is fitted by ridge regression. The
//! trained network then runs closed-loop: each scalar prediction is pushed
//! back into the delay window to produce the next one.
//!
//! The crate covers the full experimental pipeline:
//!
//! - [`linalg`]: the small dense/sparse kernel (CSR matrices, spectral-radius
//!   estimation, the regularized readout solve);
//! - [`reservoir`]: random network generation and the leaky state update;
//! - [`embedding`]: delay-window construction from scalar series;
//! - [`training`] / [`prediction`]: readout fitting, free-run and
//!   teacher-forced forecasting;
//! - [`systems`]: Lorenz and Rössler integration plus a synthetic
//!   quasi-periodic traffic generator;
//! - [`metrics`]: NRMSE, per-step NMAE, Pearson correlation;
//! - [`experiments`]: the Monte-Carlo ablation harness over the embedding
//!   dimension (parallel when the `parallel` feature is on).

pub mod embedding;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod metrics;
pub mod prediction;
pub mod reservoir;
pub mod systems;
pub mod training;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
