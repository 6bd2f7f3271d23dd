//! Library surface of the batch CLI: command implementations, flat-file
//! ingestion/export, and report emission. The `diffmorph` binary is a thin
//! argument-parsing wrapper over this crate.

pub mod commands;
pub mod io;
pub mod report;
pub mod rng;
