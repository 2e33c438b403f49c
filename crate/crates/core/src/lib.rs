//! Estimation of fractional derivatives of the spectral function of a
//! stationary Gaussian sequence, with the deterministic ground truth and a
//! Monte Carlo harness for checking the asymptotic behaviour of the estimator.
//!
//! The estimator of `F^(alpha)` (order `alpha` in `(0, 1/2)`) is the
//! Riemann–Liouville integral of order `1 - alpha` of the periodogram.
//! Module map:
//!
//! - [`fracops`]: grid-based fractional integrals/derivatives, moduli of
//!   continuity and Hölder norms.
//! - [`specmodel`]: spectral density models and exact reference quantities.
//! - [`gsim`]: exact sampling of Gaussian sequences and of the limit process.
//! - [`estimate`]: periodogram and the fractional estimator.
//! - [`verify`]: Monte Carlo experiments and confidence bands.
//!
//! Every function on `[0, 2π]` is carried by a [`GridFunction`] on a uniform
//! grid that includes both endpoints.

pub mod config;
mod dft;
pub mod error;
pub mod estimate;
pub mod fracops;
pub mod grid;
pub mod gsim;
pub mod quad;
pub mod report;
pub mod special;
pub mod specmodel;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use estimate::{FracEstimate, Periodogram};
pub use grid::GridFunction;
pub use gsim::SamplePath;
pub use specmodel::{LimitCovariance, SpectralModel};
pub use verify::{McConfig, McReport};

/// 2π.
pub const TWO_PI: f64 = std::f64::consts::TAU;
