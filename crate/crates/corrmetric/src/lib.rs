//! Command-line front end and file formats for `corrmetric-core`.
//!
//! * [`dataset`]: CSV ingestion (one sample per row).
//! * [`report`]: JSON documents for sweep reports, counterexamples and
//!   nearest-neighbour answers.
//! * [`index_io`]: versioned JSON serialization of a [`QmIndex`](corrmetric_core::QmIndex).
//! * [`parallel`]: rayon-backed sweeps that reduce to the same reports as the
//!   sequential ones.
//! * [`cli`]: the `corrmetric` binary.

pub mod cli;
pub mod dataset;
mod error;
pub mod fmt;
pub mod index_io;
pub mod parallel;
pub mod report;

pub use error::CliError;

/// Version stamped into every JSON document written by this crate.
pub const SCHEMA_VERSION: u32 = 1;
