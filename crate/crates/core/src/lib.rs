//! Ordinal pattern statistics for stationary Gaussian time series.
//!
//! The crate is `no_std` with `alloc`: pattern encoding, covariance models,
//! Hermite coefficients, estimators and seeded random streams. File formats,
//! synthesis and the command line live in the `ordpat` crate.

#![no_std]

extern crate alloc;

pub mod coeff;
pub mod cov;
pub mod error;
pub mod estimate;
pub mod hurst;
pub mod pattern;
pub mod rng;
pub mod stats;

pub use coeff::{LimitLaw, Rank1Coeffs, Rank2Coeffs, Target};
pub use cov::{CovModel, LrdParams, ToeplitzCov};
pub use error::{Error, ErrorClass, Result};
pub use estimate::{Estimate, Interpretation, SeriesView};
pub use hurst::{HurstResult, Regime};
pub use pattern::{Pattern, ReversalGroup};
