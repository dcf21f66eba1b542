//! Experiment drivers and file formats behind the `fairl` binary.
//!
//! Everything here is std-side plumbing: JSON configs, CSV result tables,
//! seeded experiment sweeps. The learning itself lives in `fairl-core`.

pub mod config;
pub mod experiments;
pub mod io;
pub mod table;
