//! Training protocol: alternating main/classifier updates, validation-driven
//! early stopping, loss ablations and autoencoder pre-training.

mod ablation;
mod early_stop;
mod eval;
mod fit;

pub use ablation::AblationId;
pub use early_stop::{EarlyStopping, Observation};
pub use eval::{evaluate, TaskMetric};
pub use fit::{fit, ioda, ioda_pretrain, EpochLog, FitOutcome, History, Monitor, PretrainConfig, StopReason, TrainConfig};
