//! Fixed random network generation and the leaky reservoir update.
//!
//! The recurrent weights `W` come from an Erdős–Rényi draw (each entry
//! nonzero independently with probability `p`) rescaled to a target spectral
//! radius; the input weights `W_in` are dense uniform draws. Neither is ever
//! trained. The state evolves as
//!
//! ```text
//! r <- (1 - alpha) * r + alpha * psi(W r + W_in u)
//! ```
//!
//! with `psi` applied elementwise.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, DenseMatrix, SparseMatrix, Vector};
use crate::training::ScalerKind;

/// Elementwise reservoir nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    /// Logistic sigmoid `1 / (1 + e^(-x))`.
    Logistic,
    /// Passes values through unchanged. Exists so tests can build exactly
    /// solvable linear fixtures; not offered on the command line.
    #[doc(hidden)]
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Logistic => 1.0 / (1.0 + (-x).exp()),
            Activation::Identity => x,
        }
    }
}

/// Distribution of the nonzero recurrent weights before rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// Nonzeros uniform on [-1, 1) — the default.
    UniformPm1,
    /// Nonzeros all 1 (a literal random-graph adjacency matrix).
    Binary01,
}

/// Every knob of the network and its training procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsnConfig {
    /// Number of reservoir neurons `n`.
    pub reservoir_size: usize,
    /// Probability that any given recurrent weight is nonzero.
    pub connection_probability: f64,
    /// Delay-window length `m`.
    pub embedding_dimension: usize,
    /// Leaking rate `alpha` in (0, 1].
    pub leaking_rate: f64,
    /// Ridge regularization `beta`.
    pub regularization: f64,
    pub activation: Activation,
    /// Spectral radius the recurrent weights are rescaled to. 1.0 normalizes
    /// `W` by its spectral radius exactly; 0.95 is the conservative choice if
    /// the echo-state property matters more than fidelity.
    pub spectral_radius_target: f64,
    /// Leading state/target pairs discarded before the readout fit.
    pub washout: usize,
    /// Input weights are uniform on +- this value.
    pub input_weight_halfwidth: f64,
    pub reservoir_weight_scheme: WeightScheme,
    /// Append a constant-1 bias column to the input coupling.
    pub bias_input: bool,
    /// Input scaling applied before embedding.
    pub scaler: ScalerKind,
    /// Standard deviation of seeded Gaussian jitter added to the recorded
    /// reservoir states during training (never during prediction, and never
    /// propagated through the recursion). The classical noise-injection
    /// regularizer: it shrinks the readout, which keeps closed-loop feedback
    /// from amplifying its own one-step errors. Zero reproduces the literal
    /// noise-free regression.
    pub state_noise_std: f64,
    pub seed: u64,
}

impl Default for EsnConfig {
    fn default() -> Self {
        Self {
            reservoir_size: 500,
            connection_probability: 0.01,
            embedding_dimension: 1,
            leaking_rate: 0.3,
            regularization: 1e-6,
            activation: Activation::Tanh,
            spectral_radius_target: 1.0,
            washout: 0,
            input_weight_halfwidth: 0.5,
            reservoir_weight_scheme: WeightScheme::UniformPm1,
            bias_input: false,
            scaler: ScalerKind::None,
            state_noise_std: 0.0,
            seed: 0,
        }
    }
}

impl EsnConfig {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, what: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(what.into()))
            }
        }
        check(self.reservoir_size >= 1, "reservoir size must be at least 1")?;
        check(
            self.connection_probability > 0.0 && self.connection_probability <= 1.0,
            "connection probability must be in (0, 1]",
        )?;
        check(self.embedding_dimension >= 1, "embedding dimension must be at least 1")?;
        check(
            self.leaking_rate > 0.0 && self.leaking_rate <= 1.0,
            "leaking rate must be in (0, 1]",
        )?;
        check(
            self.regularization > 0.0 && self.regularization.is_finite(),
            "regularization must be positive",
        )?;
        check(
            self.spectral_radius_target > 0.0 && self.spectral_radius_target.is_finite(),
            "spectral radius target must be positive",
        )?;
        check(
            self.input_weight_halfwidth > 0.0 && self.input_weight_halfwidth.is_finite(),
            "input weight halfwidth must be positive",
        )?;
        check(
            self.state_noise_std >= 0.0 && self.state_noise_std.is_finite(),
            "state noise must be nonnegative",
        )
    }

    /// Input dimension of `W_in` (embedding plus the optional bias column).
    pub fn input_columns(&self) -> usize {
        self.embedding_dimension + usize::from(self.bias_input)
    }
}

// ChaCha substream layout under the user seed: W draw attempt `k` uses
// stream `k` (raised on retry after a degenerate draw), the input weights
// and the training state noise use streams far past the retry range.
const MAX_W_ATTEMPTS: u64 = 16;
const STREAM_W_IN: u64 = 32;
pub(crate) const STREAM_STATE_NOISE: u64 = 64;

// Accuracy of the normalization step; spectral radius then matches the
// target to well within the documented 1e-3.
const SPECTRAL_TOL: f64 = 1e-6;
const SPECTRAL_MAX_ITERS: usize = 2000;
// Radius below which a draw cannot be rescaled and is redrawn.
const MIN_NORMALIZABLE_RADIUS: f64 = 1e-9;

pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A fixed random network together with its evolving state.
#[derive(Debug, Clone)]
pub struct Reservoir {
    w: SparseMatrix,
    w_in: DenseMatrix,
    state: Vector,
    config: EsnConfig,
}

impl Reservoir {
    /// Draw the network deterministically from `config.seed`.
    ///
    /// Entries of `W` (self-loops included) are nonzero independently with
    /// probability `p`; the matrix is rescaled so its spectral radius hits
    /// the target. Draws whose radius is numerically zero (all-zero or
    /// nilpotent, possible at tiny `n * p`) are retried on the next
    /// substream, up to 16 times.
    pub fn generate(config: &EsnConfig) -> Result<Self> {
        config.validate()?;
        let n = config.reservoir_size;

        let mut w = None;
        for attempt in 0..MAX_W_ATTEMPTS {
            let mut rng = substream(config.seed, attempt);
            let mut triplets = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if rng.random::<f64>() < config.connection_probability {
                        let value = match config.reservoir_weight_scheme {
                            WeightScheme::UniformPm1 => rng.random_range(-1.0..1.0),
                            WeightScheme::Binary01 => 1.0,
                        };
                        triplets.push((i, j, value));
                    }
                }
            }
            let mut candidate = SparseMatrix::from_triplets(n, n, &triplets)?;
            let estimate = spectral_radius(&candidate, SPECTRAL_TOL, SPECTRAL_MAX_ITERS)?;
            if estimate.value > MIN_NORMALIZABLE_RADIUS {
                candidate.scale(config.spectral_radius_target / estimate.value);
                w = Some(candidate);
                break;
            }
        }
        let w = w.ok_or_else(|| {
            Error::Generation(format!(
                "no normalizable weight draw in {MAX_W_ATTEMPTS} attempts \
                 (n = {n}, p = {})",
                config.connection_probability
            ))
        })?;

        let mut rng = substream(config.seed, STREAM_W_IN);
        let cols = config.input_columns();
        let hw = config.input_weight_halfwidth;
        let w_in = DenseMatrix::new(
            n,
            cols,
            (0..n * cols).map(|_| rng.random_range(-hw..hw)).collect(),
        )?;

        Ok(Self {
            w,
            w_in,
            state: Vector::zeros(n),
            config: config.clone(),
        })
    }

    /// Reassemble a reservoir from stored parts (model-file loading).
    pub fn from_parts(
        w: SparseMatrix,
        w_in: DenseMatrix,
        state: Vector,
        config: EsnConfig,
    ) -> Result<Self> {
        config.validate()?;
        let n = config.reservoir_size;
        if !w.is_square() || w.rows() != n {
            return Err(Error::Dimension(format!(
                "recurrent weights {}x{} for reservoir size {n}",
                w.rows(),
                w.cols()
            )));
        }
        if w_in.rows() != n || w_in.cols() != config.input_columns() {
            return Err(Error::Dimension(format!(
                "input weights {}x{}, expected {n}x{}",
                w_in.rows(),
                w_in.cols(),
                config.input_columns()
            )));
        }
        if state.len() != n {
            return Err(Error::Dimension("state length mismatch".into()));
        }
        Ok(Self { w, w_in, state, config })
    }

    pub fn size(&self) -> usize {
        self.config.reservoir_size
    }

    /// Expected input length (the embedding dimension, bias excluded).
    pub fn input_dim(&self) -> usize {
        self.config.embedding_dimension
    }

    pub fn w(&self) -> &SparseMatrix {
        &self.w
    }

    pub fn w_in(&self) -> &DenseMatrix {
        &self.w_in
    }

    pub fn config(&self) -> &EsnConfig {
        &self.config
    }

    pub fn state(&self) -> &Vector {
        &self.state
    }

    pub fn set_state(&mut self, state: Vector) -> Result<()> {
        if state.len() != self.size() {
            return Err(Error::Dimension(format!(
                "state length {} for reservoir of size {}",
                state.len(),
                self.size()
            )));
        }
        self.state = state;
        Ok(())
    }

    pub fn reset_state(&mut self) {
        self.state = Vector::zeros(self.size());
    }

    /// One leaky update with input `u`; returns the state after the update.
    ///
    /// When the configuration has a bias column, the constant 1 is appended
    /// internally; callers always pass plain length-`m` inputs.
    pub fn step(&mut self, input: &[f64]) -> Result<&Vector> {
        if input.len() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "input length {} but embedding dimension is {}",
                input.len(),
                self.input_dim()
            )));
        }
        let alpha = self.config.leaking_rate;
        let act = self.config.activation;

        let mut pre = self.w.spmv_slice(self.state.as_slice());
        for (i, p) in pre.iter_mut().enumerate() {
            let row = self.w_in.row(i);
            let mut acc = 0.0;
            for (w, u) in row.iter().zip(input) {
                acc += w * u;
            }
            if self.config.bias_input {
                acc += row[input.len()];
            }
            *p += acc;
        }

        let next: Vec<f64> = self
            .state
            .iter()
            .zip(&pre)
            .map(|(r, z)| (1.0 - alpha) * r + alpha * act.apply(*z))
            .collect();
        self.state = Vector::from_raw(next);
        Ok(&self.state)
    }

    /// Run `step` over a whole input sequence, collecting the state after
    /// each input. The reservoir is left in the final state.
    pub fn drive<I: AsRef<[f64]>>(&mut self, inputs: &[I]) -> Result<Vec<Vector>> {
        let mut states = Vec::with_capacity(inputs.len());
        for input in inputs {
            states.push(self.step(input.as_ref())?.clone());
        }
        Ok(states)
    }
}
