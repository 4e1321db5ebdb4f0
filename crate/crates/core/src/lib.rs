//! Uniform random covering sets on the d-torus.
//!
//! This crate is the allocation-only core: torus geometry, radius schedules,
//! counter-based sampling, dyadic grid covers, closed-form dimension bounds,
//! measure-dichotomy classification, hitting times and the greedy
//! cover-growth construction. It needs `alloc` but not `std`; IO, file
//! formats, threading and the command line live in the `ucover` crate.
//!
//! Balls are open everywhere: `y ∈ B(x, r)` iff `torus_dist(x, y) < r`,
//! where the distance is the max-norm to the nearest integer translate.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod covering;
pub mod criteria;
mod error;
pub mod geometry;
pub mod grid;
pub mod growth;
pub mod hitting;
mod math;
pub mod measure;
pub mod moments;
pub mod optimize;
pub mod schedule;
pub mod spatial;
pub mod stats;
pub mod stream;

pub use error::{Error, Result};
pub use geometry::{torus_dist, TorusPoint};
pub use grid::GridCover;
pub use measure::MeasureModel;
pub use schedule::RadiusSchedule;
pub use stream::{ExplicitStream, PointSource, SampleStream};
