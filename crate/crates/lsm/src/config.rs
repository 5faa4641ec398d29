//! Run configuration file.
//!
//! A flat JSON object; every key is optional and unknown keys are rejected.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `name` | `"lsm"` | label used in run ids, tables and plots |
//! | `lr` | `0.001` | Adam learning rate (main and classifier optimizers) |
//! | `batch_paired`, `batch_x`, `batch_y` | `16` | batch size per bank |
//! | `max_epochs` | `1000` | epoch budget |
//! | `patience` | `100` | epochs without improvement before stopping |
//! | `weights` | all `1.0` | `recon_x`, `recon_y`, `sup_xy`, `sup_yx`, `distance`, `confusion` |
//! | `ablation` | none | four-digit id; switched-off terms get weight 0 |
//! | `seed` | `0` | model initialization and batch order |
//! | `metric` | `"auto"` | `auto`, `miou`, `nrmse` or `mse` |
//! | `monitor` | `"val"` | `val` or `train` (paired training bank) |
//! | `target` | none | stop once the monitored metric reaches this value |
//! | `model` | see [`ModelConfigJson`] | `latent_dim`, `encoder_hidden`, `link_hidden_layers`, `classifier_hidden` |
//! | `ioda_pretrain_epochs` | none | autoencoder pre-training, then supervised fine-tuning |

use std::path::Path;

use lsm_core::data::DatasetInfo;
use lsm_core::model::{DomainSpec, LossWeights};
use lsm_core::train::{AblationId, Monitor, PretrainConfig, TaskMetric, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{LsmError, Result};
use crate::format::{read_file, sha256_hex, ModelConfigJson};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsJson {
    pub recon_x: f64,
    pub recon_y: f64,
    pub sup_xy: f64,
    pub sup_yx: f64,
    pub distance: f64,
    pub confusion: f64,
}

impl Default for WeightsJson {
    fn default() -> Self {
        WeightsJson::from_weights(&LossWeights::lsm())
    }
}

impl WeightsJson {
    pub fn from_weights(w: &LossWeights) -> Self {
        WeightsJson {
            recon_x: w.recon_x,
            recon_y: w.recon_y,
            sup_xy: w.sup_xy,
            sup_yx: w.sup_yx,
            distance: w.distance,
            confusion: w.confusion,
        }
    }

    pub fn to_weights(self) -> LossWeights {
        LossWeights {
            recon_x: self.recon_x,
            recon_y: self.recon_y,
            sup_xy: self.sup_xy,
            sup_yx: self.sup_yx,
            distance: self.distance,
            confusion: self.confusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub name: String,
    pub lr: f64,
    pub batch_paired: usize,
    pub batch_x: usize,
    pub batch_y: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub weights: WeightsJson,
    pub ablation: Option<String>,
    pub seed: u64,
    pub metric: String,
    pub monitor: String,
    pub target: Option<f64>,
    pub model: ModelConfigJson,
    pub ioda_pretrain_epochs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            name: "lsm".into(),
            lr: 1e-3,
            batch_paired: 16,
            batch_x: 16,
            batch_y: 16,
            max_epochs: 1000,
            patience: 100,
            weights: WeightsJson::default(),
            ablation: None,
            seed: 0,
            metric: "auto".into(),
            monitor: "val".into(),
            target: None,
            model: ModelConfigJson::default(),
            ioda_pretrain_epochs: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        let cfg: RunConfig = serde_json::from_slice(&bytes).map_err(|e| LsmError::Config {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        cfg.validate().map_err(|msg| LsmError::Config {
            path: path.to_path_buf(),
            msg,
        })?;
        Ok(cfg)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.name.is_empty() || self.name.contains(['/', ',', '\n']) {
            return Err("name must be non-empty without '/', ',' or newlines".into());
        }
        if let Some(a) = &self.ablation {
            a.parse::<AblationId>().map_err(|e| e.to_string())?;
        }
        if !matches!(self.metric.as_str(), "auto" | "miou" | "nrmse" | "mse") {
            return Err(format!("unknown metric {:?}", self.metric));
        }
        if !matches!(self.monitor.as_str(), "val" | "train") {
            return Err(format!("unknown monitor {:?}", self.monitor));
        }
        if self.model.latent_dim == 0 || self.model.encoder_hidden.contains(&0) || self.model.classifier_hidden.contains(&0) {
            return Err("layer widths must be positive".into());
        }
        // Checks shared with the trainer (batch sizes, patience, weights).
        self.train_config(TaskMetric::Mse).validate().map_err(|e| e.to_string())
    }

    pub fn weights(&self) -> LossWeights {
        match &self.ablation {
            Some(a) => a.parse::<AblationId>().expect("validated").apply(&self.weights.to_weights()),
            None => self.weights.to_weights(),
        }
    }

    /// Metric named in the config, or the natural one for the target domain.
    pub fn task_metric(&self, y: &DomainSpec, info: &DatasetInfo) -> Result<TaskMetric> {
        Ok(match self.metric.as_str() {
            "miou" => TaskMetric::Miou,
            "mse" => TaskMetric::Mse,
            "nrmse" => TaskMetric::Nrmse {
                eyes: info
                    .eye_indices
                    .ok_or_else(|| LsmError::Usage("nrmse needs eye indices in the dataset manifest".into()))?,
            },
            _ => TaskMetric::for_target(y, info),
        })
    }

    pub fn train_config(&self, metric: TaskMetric) -> TrainConfig {
        TrainConfig {
            lr: self.lr,
            batch_paired: self.batch_paired,
            batch_x: self.batch_x,
            batch_y: self.batch_y,
            max_epochs: self.max_epochs,
            patience: self.patience,
            weights: self.weights(),
            seed: self.seed,
            metric,
            monitor: if self.monitor == "train" {
                Monitor::TrainPaired
            } else {
                Monitor::Validation
            },
            target: self.target,
        }
    }

    pub fn pretrain(&self) -> Option<PretrainConfig> {
        self.ioda_pretrain_epochs.map(|epochs| PretrainConfig {
            epochs,
            lr: self.lr,
            batch: self.batch_x.max(self.batch_y),
            seed: self.seed,
        })
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        sha256_hex(text.as_bytes())[..16].to_string()
    }
}
