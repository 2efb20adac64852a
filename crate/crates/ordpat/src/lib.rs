//! Standard-library companion to `ordpat-core`: exact fGn synthesis,
//! parallel Monte Carlo campaigns, distribution summaries and file IO.

pub mod cli;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod par;
pub mod summary;
pub mod synth;

pub use error::{Error, Result};
pub use ordpat_core as core;
