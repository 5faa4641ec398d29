//! File formats, experiment drivers, reports and the `lsm` command line for
//! the `lsm-core` latent space mapping library.
//!
//! - [`format`]: dataset, bundle and model directories with hashed raw tensors.
//! - [`config`]: JSON run configuration.
//! - [`records`]: the append-only metric log.
//! - [`experiment`]: single runs, supervision sweeps and ablations.
//! - [`report`]: markdown tables, summary CSV and SVG plots.
//! - [`import`]: user images and landmark tables.
//! - [`cli`]: argument parsing and command dispatch.

#![warn(rust_2018_idioms, unused_qualifications)]

pub mod cli;
pub mod config;
mod error;
pub mod experiment;
pub mod format;
pub mod import;
pub mod records;
pub mod report;

pub use error::{LsmError, Result};
