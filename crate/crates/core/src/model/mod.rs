//! The two-domain LSM network and every loss it trains on.

mod batch;
mod domain;
pub mod losses;
mod lsm;

pub use batch::{Batch, BatchKind};
pub use domain::{DomainSpec, LossKind, Modality};
pub use lsm::{
    domain_classifier_loss, confusion_loss, final_loss, latent_distance_loss, reconstruction_loss,
    supervised_translation_loss, translate, Direction, LossReport, LossWeights, LsmModel, ModelConfig, Net,
    Reconstruction, Session, StepGraph, Term,
};

#[cfg(test)]
mod tests;
