//! Minimal dense/sparse numerical kernel.
//!
//! Exactly the operations the pipeline needs: dense and CSR matrix storage,
//! matrix–vector products, a power-iteration spectral-radius estimator, and
//! the Tikhonov-regularized readout solve. Everything is `f64`, row-major,
//! and immutable after construction, so values can be shared freely across
//! worker threads.

mod dense;
mod ridge;
mod sparse;
mod spectral;

pub use dense::{DenseMatrix, Vector};
pub use ridge::ridge_solve;
pub use sparse::SparseMatrix;
pub use spectral::{spectral_radius, SpectralRadiusEstimate};
