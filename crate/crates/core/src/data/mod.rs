//! Datasets of paired views, synthetic generators and the semi-supervised
//! split.
//!
//! A dataset row holds one flattened view per domain. Images are stored
//! channel-last (`[H, W, C]`) with pixel `(row, col)` centered at
//! `((col + 0.5) / S, (row + 0.5) / S)` in unit coordinates.

mod landmarks;
mod sit;
mod split;
mod texture;

use alloc::string::String;
use alloc::vec::Vec;

pub use landmarks::{
    gen_landmark_dataset, render_face, FaceParams, LandmarkSample, LandmarkSpec, LANDMARK_GENERATOR,
};
pub use sit::{
    gen_sit_dataset, mask_from_params, render_sit, swap_params, SitDataset, SitParams, SitSample, CX_RANGE,
    CY_RANGE, R_RANGE, SIT_CLASS_NAMES, SIT_GENERATOR, T_RANGE,
};
pub use split::{split_counts, split_semi_supervised, DatasetBundle, PairBank, SplitCounts, ViewBank};
pub use texture::{Texture, TexturePair};

use crate::model::DomainSpec;
use crate::{Error, Result, Tensor};

/// Row-major matrix of flattened items. Unlike [`Tensor`] it may be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Rows {
    dim: usize,
    data: Vec<f64>,
}

impl Rows {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::invalid("row data length is not a multiple of the row width"));
        }
        Ok(Rows { dim, data })
    }

    pub fn empty(dim: usize) -> Self {
        Rows { dim, data: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::ShapeMismatch {
                op: "push_row",
                left: alloc::vec![self.dim],
                right: alloc::vec![row.len()],
            });
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    /// Rows at `indices` as a `[indices.len(), dim]` tensor.
    pub fn gather(&self, indices: &[usize]) -> Result<Tensor> {
        if indices.is_empty() {
            return Err(Error::EmptyBatch("gather of zero rows"));
        }
        let mut out = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::invalid(alloc::format!("row {i} out of range for {} rows", self.len())));
            }
            out.extend_from_slice(self.row(i));
        }
        Tensor::new(alloc::vec![indices.len(), self.dim], out)
    }

    /// Every row as one tensor; `None` when empty.
    pub fn to_tensor(&self) -> Option<Tensor> {
        if self.is_empty() {
            None
        } else {
            Tensor::new(alloc::vec![self.len(), self.dim], self.data.clone()).ok()
        }
    }

    pub fn select(&self, indices: &[usize]) -> Rows {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Rows { dim: self.dim, data }
    }
}

/// Provenance recorded alongside a dataset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetInfo {
    pub generator: String,
    pub seed: Option<u64>,
    /// Image side length for generated image data.
    pub size: Option<usize>,
    pub class_names: Vec<String>,
    /// Landmark indices used for inter-ocular normalization.
    pub eye_indices: Option<(usize, usize)>,
    /// Parameter draws rejected as degenerate during generation.
    pub resampled: usize,
}

/// Aligned views of `n` underlying samples in two domains.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset {
    pub x_spec: DomainSpec,
    pub y_spec: DomainSpec,
    pub x: Rows,
    pub y: Rows,
    pub info: DatasetInfo,
}

impl PairedDataset {
    pub fn new(x_spec: DomainSpec, y_spec: DomainSpec, x: Rows, y: Rows, info: DatasetInfo) -> Result<Self> {
        x_spec.validate()?;
        y_spec.validate()?;
        if x.dim() != x_spec.dim() || y.dim() != y_spec.dim() {
            return Err(Error::invalid("row width differs from the domain dimension"));
        }
        if x.len() != y.len() {
            return Err(Error::invalid("x and y views have different counts"));
        }
        Ok(PairedDataset {
            x_spec,
            y_spec,
            x,
            y,
            info,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}
