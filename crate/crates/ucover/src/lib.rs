//! Threaded drivers, file formats and the `ucover` command line on top of
//! [`ucover_core`].
//!
//! Every parallel routine here reduces in a fixed order, so results are
//! bit-identical for any thread count. The thread count comes from the
//! `UCOVER_THREADS` environment variable and defaults to the available
//! hardware parallelism.

pub mod cli;
mod error;
pub mod io;
pub mod parallel;

pub use error::{Error, Result};
pub use ucover_core as core;

/// Tool version embedded in every output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
