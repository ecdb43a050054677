//! Per-system hyperparameter presets.
//!
//! Each preset pins `n`, `p`, the training length, the activation, the
//! leaking rate and the regularization per system. The remaining knobs
//! (scaling, washout, bias column, spectral-radius target, input halfwidth,
//! training jitter) were calibrated by pilot ablations and are what make the
//! closed-loop forecasts stable at these short training lengths.

use clap::ValueEnum;
use delay_esn::reservoir::{Activation, EsnConfig};
use delay_esn::training::ScalerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Profile {
    Lorenz,
    Rossler,
    Traffic,
    /// Library defaults; every knob comes from flags.
    Custom,
}

/// A profile resolved to its full configuration plus the training length.
#[derive(Debug, Clone)]
pub struct ResolvedProfile {
    pub config: EsnConfig,
    pub train_len: usize,
    /// Default free-run horizon for ablations.
    pub horizon: usize,
}

pub fn resolve(profile: Profile) -> ResolvedProfile {
    match profile {
        Profile::Lorenz => ResolvedProfile {
            config: EsnConfig {
                reservoir_size: 500,
                connection_probability: 0.01,
                leaking_rate: 0.3,
                regularization: 1e-6,
                activation: Activation::Tanh,
                scaler: ScalerKind::Zscore,
                washout: 100,
                bias_input: true,
                spectral_radius_target: 0.3,
                input_weight_halfwidth: 1.5,
                state_noise_std: 5e-4,
                ..EsnConfig::default()
            },
            train_len: 1000,
            horizon: 300,
        },
        Profile::Rossler => ResolvedProfile {
            config: EsnConfig {
                reservoir_size: 500,
                connection_probability: 0.01,
                leaking_rate: 0.3,
                regularization: 1e-6,
                activation: Activation::Tanh,
                scaler: ScalerKind::Zscore,
                washout: 100,
                bias_input: true,
                spectral_radius_target: 0.3,
                input_weight_halfwidth: 1.0,
                state_noise_std: 1e-3,
                ..EsnConfig::default()
            },
            train_len: 1000,
            horizon: 300,
        },
        Profile::Traffic => ResolvedProfile {
            config: EsnConfig {
                reservoir_size: 4000,
                connection_probability: 0.01,
                leaking_rate: 0.7,
                regularization: 1e-6,
                activation: Activation::Tanh,
                scaler: ScalerKind::Zscore,
                washout: 100,
                bias_input: true,
                spectral_radius_target: 0.3,
                input_weight_halfwidth: 0.1,
                state_noise_std: 1e-1,
                ..EsnConfig::default()
            },
            train_len: 1000,
            horizon: 168,
        },
        Profile::Custom => ResolvedProfile {
            config: EsnConfig::default(),
            train_len: 1000,
            horizon: 300,
        },
    }
}
