//! On-disk formats.
//!
//! A dataset or bundle is a directory holding `manifest.json` and one raw
//! little-endian `f64` file per matrix. The manifest lists each file with its
//! shape and SHA-256; loading verifies both. A model checkpoint is a
//! directory holding `model.json` and `params.bin`.

use std::fs;
use std::path::{Path, PathBuf};

use lsm_core::data::{DatasetBundle, DatasetInfo, PairBank, PairedDataset, Rows, ViewBank};
use lsm_core::model::{DomainSpec, LossKind, LsmModel, Modality, ModelConfig, Net};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LsmError, Result};

pub const DATASET_FORMAT: &str = "lsm-dataset";
pub const MODEL_FORMAT: &str = "lsm-model";
pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModalityJson {
    Image { channels: usize, height: usize, width: usize },
    Vector { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainJson {
    pub name: String,
    pub modality: ModalityJson,
    pub recon_loss: String,
    pub translation_loss: String,
}

impl DomainJson {
    pub fn from_spec(s: &DomainSpec) -> Self {
        DomainJson {
            name: s.name.clone(),
            modality: match s.modality {
                Modality::ImageGrid {
                    channels,
                    height,
                    width,
                } => ModalityJson::Image {
                    channels,
                    height,
                    width,
                },
                Modality::Vector { dim } => ModalityJson::Vector { dim },
            },
            recon_loss: s.recon_loss.name().into(),
            translation_loss: s.translation_loss.name().into(),
        }
    }

    pub fn to_spec(&self, path: &Path) -> Result<DomainSpec> {
        let loss = |s: &str| LossKind::parse(s).ok_or_else(|| LsmError::format(path, format!("unknown loss {s:?}")));
        let modality = match self.modality {
            ModalityJson::Image {
                channels,
                height,
                width,
            } => Modality::ImageGrid {
                channels,
                height,
                width,
            },
            ModalityJson::Vector { dim } => Modality::Vector { dim },
        };
        DomainSpec::new(&self.name, modality, loss(&self.recon_loss)?, loss(&self.translation_loss)?)
            .map_err(|e| LsmError::format(path, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorEntry {
    pub name: String,
    pub file: String,
    pub rows: usize,
    pub cols: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankCounts {
    pub paired: usize,
    pub x_only: usize,
    pub y_only: usize,
    pub val: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitJson {
    pub n_percent: u32,
    pub seed: u64,
    pub counts: BankCounts,
    pub origins: Origins,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Origins {
    pub paired: Vec<usize>,
    pub x_only: Vec<usize>,
    pub y_only: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    /// `dataset` (aligned views) or `bundle` (semi-supervised split).
    pub kind: String,
    pub generator: String,
    pub seed: Option<u64>,
    pub size: Option<usize>,
    /// Number of underlying samples.
    pub n: usize,
    pub resampled: usize,
    pub class_names: Vec<String>,
    pub eye_indices: Option<[usize; 2]>,
    pub x_domain: DomainJson,
    pub y_domain: DomainJson,
    pub split: Option<SplitJson>,
    pub tensors: Vec<TensorEntry>,
}

impl Manifest {
    fn info(&self) -> DatasetInfo {
        DatasetInfo {
            generator: self.generator.clone(),
            seed: self.seed,
            size: self.size,
            class_names: self.class_names.clone(),
            eye_indices: self.eye_indices.map(|[a, b]| (a, b)),
            resampled: self.resampled,
        }
    }

    fn tensor(&self, name: &str, path: &Path) -> Result<&TensorEntry> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| LsmError::format(path, format!("manifest lists no tensor {name:?}")))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn f64_bytes(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| LsmError::io(dir, e))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| LsmError::io(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| LsmError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("manifest types serialize");
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|e| LsmError::format(path, e.to_string()))
}

fn write_rows(dir: &Path, name: &str, rows: &Rows) -> Result<TensorEntry> {
    let bytes = f64_bytes(rows.data());
    let file = format!("{name}.bin");
    write_file(&dir.join(&file), &bytes)?;
    Ok(TensorEntry {
        name: name.into(),
        file,
        rows: rows.len(),
        cols: rows.dim(),
        sha256: sha256_hex(&bytes),
    })
}

/// Decodes little-endian `f64`s, failing at the first byte offset where the
/// data ends short of `expected` bytes.
pub fn decode_f64(path: &Path, bytes: &[u8], expected: usize) -> Result<Vec<f64>> {
    if bytes.len() < expected {
        return Err(LsmError::integrity(
            path,
            format!("truncated at byte offset {}: expected {expected} bytes", bytes.len()),
        ));
    }
    if bytes.len() > expected {
        return Err(LsmError::integrity(
            path,
            format!("unexpected data at byte offset {expected}: file has {} bytes", bytes.len()),
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

fn read_rows(dir: &Path, entry: &TensorEntry) -> Result<Rows> {
    let path = dir.join(&entry.file);
    if entry.file.contains(['/', '\\']) {
        return Err(LsmError::format(&path, "tensor file must live in the dataset directory"));
    }
    let bytes = read_file(&path)?;
    let values = decode_f64(&path, &bytes, entry.rows * entry.cols * 8)?;
    let hash = sha256_hex(&bytes);
    if hash != entry.sha256 {
        return Err(LsmError::integrity(
            &path,
            format!("sha256 {hash} does not match manifest {}", entry.sha256),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(LsmError::integrity(&path, "non-finite value"));
    }
    Rows::new(entry.cols, values).map_err(|e| LsmError::format(&path, e.to_string()))
}

fn base_manifest(kind: &str, x: &DomainSpec, y: &DomainSpec, info: &DatasetInfo, n: usize) -> Manifest {
    Manifest {
        format: DATASET_FORMAT.into(),
        version: FORMAT_VERSION,
        kind: kind.into(),
        generator: info.generator.clone(),
        seed: info.seed,
        size: info.size,
        n,
        resampled: info.resampled,
        class_names: info.class_names.clone(),
        eye_indices: info.eye_indices.map(|(a, b)| [a, b]),
        x_domain: DomainJson::from_spec(x),
        y_domain: DomainJson::from_spec(y),
        split: None,
        tensors: Vec::new(),
    }
}

/// Writes a dataset; `extra` matrices (such as generation parameters) are
/// stored and hashed alongside the views.
pub fn save_dataset(dir: &Path, ds: &PairedDataset, extra: &[(&str, &Rows)]) -> Result<()> {
    create_dir(dir)?;
    let mut m = base_manifest("dataset", &ds.x_spec, &ds.y_spec, &ds.info, ds.len());
    m.tensors.push(write_rows(dir, "x", &ds.x)?);
    m.tensors.push(write_rows(dir, "y", &ds.y)?);
    for (name, rows) in extra {
        m.tensors.push(write_rows(dir, name, rows)?);
    }
    write_json(&dir.join(MANIFEST), &m)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let m: Manifest = read_json(&path)?;
    if m.format != DATASET_FORMAT || m.version != FORMAT_VERSION {
        return Err(LsmError::format(
            &path,
            format!("unsupported format {} v{}", m.format, m.version),
        ));
    }
    Ok(m)
}

pub fn load_dataset(dir: &Path) -> Result<PairedDataset> {
    let m = load_manifest(dir)?;
    let path = dir.join(MANIFEST);
    if m.kind != "dataset" {
        return Err(LsmError::format(&path, format!("expected a dataset, found a {}", m.kind)));
    }
    let x = read_rows(dir, m.tensor("x", &path)?)?;
    let y = read_rows(dir, m.tensor("y", &path)?)?;
    let ds = PairedDataset::new(m.x_domain.to_spec(&path)?, m.y_domain.to_spec(&path)?, x, y, m.info())
        .map_err(|e| LsmError::format(&path, e.to_string()))?;
    if ds.len() != m.n {
        return Err(LsmError::format(&path, "sample count differs from manifest"));
    }
    Ok(ds)
}

/// Reads an extra matrix stored with [`save_dataset`].
pub fn load_extra(dir: &Path, name: &str) -> Result<Rows> {
    let m = load_manifest(dir)?;
    read_rows(dir, m.tensor(name, &dir.join(MANIFEST))?)
}

pub fn save_bundle(dir: &Path, b: &DatasetBundle) -> Result<()> {
    create_dir(dir)?;
    let mut m = base_manifest("bundle", &b.x_spec, &b.y_spec, &b.info, b.source_len);
    m.split = Some(SplitJson {
        n_percent: b.n_percent,
        seed: b.split_seed,
        counts: BankCounts {
            paired: b.paired.len(),
            x_only: b.x_only.len(),
            y_only: b.y_only.len(),
            val: b.val.len(),
            test: b.test.len(),
        },
        origins: Origins {
            paired: b.paired.origins.clone(),
            x_only: b.x_only.origins.clone(),
            y_only: b.y_only.origins.clone(),
            val: b.val.origins.clone(),
            test: b.test.origins.clone(),
        },
    });
    for (name, rows) in [
        ("paired_x", &b.paired.x),
        ("paired_y", &b.paired.y),
        ("x_only", &b.x_only.rows),
        ("y_only", &b.y_only.rows),
        ("val_x", &b.val.x),
        ("val_y", &b.val.y),
        ("test_x", &b.test.x),
        ("test_y", &b.test.y),
    ] {
        m.tensors.push(write_rows(dir, name, rows)?);
    }
    write_json(&dir.join(MANIFEST), &m)
}

pub fn load_bundle(dir: &Path) -> Result<DatasetBundle> {
    let m = load_manifest(dir)?;
    let path = dir.join(MANIFEST);
    if m.kind != "bundle" {
        return Err(LsmError::format(&path, format!("expected a bundle, found a {}", m.kind)));
    }
    let split = m
        .split
        .clone()
        .ok_or_else(|| LsmError::format(&path, "bundle manifest has no split section"))?;
    let rows = |name: &str| read_rows(dir, m.tensor(name, &path)?);
    let fmt = |e: lsm_core::Error| LsmError::format(&path, e.to_string());
    let o = split.origins;
    let bundle = DatasetBundle {
        x_spec: m.x_domain.to_spec(&path)?,
        y_spec: m.y_domain.to_spec(&path)?,
        info: m.info(),
        n_percent: split.n_percent,
        split_seed: split.seed,
        source_len: m.n,
        paired: PairBank::new(rows("paired_x")?, rows("paired_y")?, o.paired).map_err(fmt)?,
        x_only: ViewBank::new(rows("x_only")?, o.x_only).map_err(fmt)?,
        y_only: ViewBank::new(rows("y_only")?, o.y_only).map_err(fmt)?,
        val: PairBank::new(rows("val_x")?, rows("val_y")?, o.val).map_err(fmt)?,
        test: PairBank::new(rows("test_x")?, rows("test_y")?, o.test).map_err(fmt)?,
    };
    bundle.validate().map_err(fmt)?;
    Ok(bundle)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfigJson {
    pub latent_dim: usize,
    pub encoder_hidden: Vec<usize>,
    pub link_hidden_layers: usize,
    pub classifier_hidden: Vec<usize>,
}

impl Default for ModelConfigJson {
    fn default() -> Self {
        ModelConfigJson::from_config(&ModelConfig::default())
    }
}

impl ModelConfigJson {
    pub fn from_config(c: &ModelConfig) -> Self {
        ModelConfigJson {
            latent_dim: c.latent_dim,
            encoder_hidden: c.encoder_hidden.clone(),
            link_hidden_layers: c.link_hidden_layers,
            classifier_hidden: c.classifier_hidden.clone(),
        }
    }

    pub fn to_config(&self) -> ModelConfig {
        ModelConfig {
            latent_dim: self.latent_dim,
            encoder_hidden: self.encoder_hidden.clone(),
            link_hidden_layers: self.link_hidden_layers,
            classifier_hidden: self.classifier_hidden.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub format: String,
    pub version: u32,
    pub x_domain: DomainJson,
    pub y_domain: DomainJson,
    pub config: ModelConfigJson,
    /// Network names in the order their parameters appear in the file.
    pub nets: Vec<String>,
    pub param_count: usize,
    pub params_file: String,
    pub sha256: String,
}

pub fn save_model(dir: &Path, model: &LsmModel) -> Result<()> {
    create_dir(dir)?;
    let bytes = f64_bytes(&model.flat_params(&Net::ALL));
    let params_file = "params.bin".to_string();
    write_file(&dir.join(&params_file), &bytes)?;
    let meta = ModelJson {
        format: MODEL_FORMAT.into(),
        version: FORMAT_VERSION,
        x_domain: DomainJson::from_spec(&model.x),
        y_domain: DomainJson::from_spec(&model.y),
        config: ModelConfigJson::from_config(&model.config),
        nets: Net::ALL.iter().map(|n| n.name().to_string()).collect(),
        param_count: model.param_count(),
        params_file,
        sha256: sha256_hex(&bytes),
    };
    write_json(&dir.join("model.json"), &meta)
}

pub fn load_model(dir: &Path) -> Result<LsmModel> {
    let path: PathBuf = dir.join("model.json");
    let meta: ModelJson = read_json(&path)?;
    if meta.format != MODEL_FORMAT || meta.version != FORMAT_VERSION {
        return Err(LsmError::format(&path, "not a model checkpoint"));
    }
    let expected: Vec<String> = Net::ALL.iter().map(|n| n.name().to_string()).collect();
    if meta.nets != expected {
        return Err(LsmError::format(&path, "unexpected network list"));
    }
    let mut model = LsmModel::new(
        meta.x_domain.to_spec(&path)?,
        meta.y_domain.to_spec(&path)?,
        meta.config.to_config(),
        0,
    )
    .map_err(|e| LsmError::format(&path, e.to_string()))?;
    if model.param_count() != meta.param_count {
        return Err(LsmError::format(&path, "parameter count differs from the architecture"));
    }
    let ppath = dir.join(&meta.params_file);
    let bytes = read_file(&ppath)?;
    let values = decode_f64(&ppath, &bytes, meta.param_count * 8)?;
    if sha256_hex(&bytes) != meta.sha256 {
        return Err(LsmError::integrity(&ppath, "sha256 does not match model.json"));
    }
    model
        .set_flat_params(&Net::ALL, &values)
        .map_err(|e| LsmError::format(&ppath, e.to_string()))?;
    Ok(model)
}
