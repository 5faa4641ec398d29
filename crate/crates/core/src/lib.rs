//! Latent space mapping (LSM) for semi-supervised domain translation.
//!
//! Two domains `X` and `Y` each get an autoencoder (`E_x`/`D_x`, `E_y`/`D_y`).
//! Link networks carry latent codes between the two latent spaces, and the
//! translation `x -> y` is `D_y(L_xy(E_x(x)))`. Training mixes paired and
//! unpaired batches: paired data drives the supervised translation and latent
//! distance terms, unpaired data drives reconstruction and an adversarial
//! confusion term against per-domain latent classifiers.
//!
//! The crate is `no_std` (with `alloc`) and carries no IO. File formats, the
//! CLI and experiment drivers live in the `lsm` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod autodiff;
pub mod data;
mod error;
mod linalg;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod rng;
mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use tensor::Tensor;
