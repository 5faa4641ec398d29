use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::nn::OutputActivation;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Mse,
    /// Per-pixel softmax cross-entropy against one-hot class maps.
    Ce,
    Bce,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::Ce => "ce",
            LossKind::Bce => "bce",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mse" => Some(LossKind::Mse),
            "ce" => Some(LossKind::Ce),
            "bce" => Some(LossKind::Bce),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    /// Stored channel-last: one item is `[height, width, channels]`.
    ImageGrid {
        channels: usize,
        height: usize,
        width: usize,
    },
    Vector { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSpec {
    pub name: String,
    pub modality: Modality,
    /// Loss for `D(E(v))` against `v`.
    pub recon_loss: LossKind,
    /// Loss when this domain is the target of a translation.
    pub translation_loss: LossKind,
}

impl DomainSpec {
    pub fn new(name: &str, modality: Modality, recon_loss: LossKind, translation_loss: LossKind) -> Result<Self> {
        let spec = DomainSpec {
            name: name.into(),
            modality,
            recon_loss,
            translation_loss,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::invalid("domain with zero extent"));
        }
        let uses_ce = self.recon_loss == LossKind::Ce || self.translation_loss == LossKind::Ce;
        if uses_ce {
            match self.modality {
                Modality::ImageGrid { channels, .. } if channels >= 2 => {}
                _ => {
                    return Err(Error::invalid(
                        "cross-entropy needs an image domain with at least two class channels",
                    ))
                }
            }
            if self.recon_loss != self.translation_loss {
                return Err(Error::invalid("a softmax decoder cannot serve a non-CE loss"));
            }
        }
        Ok(())
    }

    /// Flattened size of one item.
    pub fn dim(&self) -> usize {
        match self.modality {
            Modality::ImageGrid {
                channels,
                height,
                width,
            } => channels * height * width,
            Modality::Vector { dim } => dim,
        }
    }

    pub fn item_shape(&self) -> Vec<usize> {
        match self.modality {
            Modality::ImageGrid {
                channels,
                height,
                width,
            } => vec![height, width, channels],
            Modality::Vector { dim } => vec![dim],
        }
    }

    /// Number of classes when items are one-hot class maps.
    pub fn classes(&self) -> Option<usize> {
        match (self.modality, self.translation_loss) {
            (Modality::ImageGrid { channels, .. }, LossKind::Ce | LossKind::Bce) if channels >= 2 => Some(channels),
            _ => None,
        }
    }

    /// Decoder head: softmax for class maps under CE, sigmoid otherwise so
    /// MSE/BCE outputs stay in `[0, 1]`.
    pub fn decoder_activation(&self) -> OutputActivation {
        match (self.translation_loss, self.modality) {
            (LossKind::Ce, Modality::ImageGrid { channels, .. }) => OutputActivation::SoftmaxPerPixel { classes: channels },
            _ => OutputActivation::Sigmoid,
        }
    }

    /// Grayscale image domain reconstructed under MSE.
    pub fn grayscale_image(name: &str, size: usize) -> Self {
        DomainSpec {
            name: name.into(),
            modality: Modality::ImageGrid {
                channels: 1,
                height: size,
                width: size,
            },
            recon_loss: LossKind::Mse,
            translation_loss: LossKind::Mse,
        }
    }

    /// One-hot class map domain.
    pub fn class_map(name: &str, size: usize, classes: usize, loss: LossKind) -> Self {
        DomainSpec {
            name: name.into(),
            modality: Modality::ImageGrid {
                channels: classes,
                height: size,
                width: size,
            },
            recon_loss: loss,
            translation_loss: loss,
        }
    }

    /// `k` landmarks flattened as `[x0, y0, x1, y1, ...]`.
    pub fn landmarks(name: &str, k: usize) -> Self {
        DomainSpec {
            name: name.into(),
            modality: Modality::Vector { dim: 2 * k },
            recon_loss: LossKind::Mse,
            translation_loss: LossKind::Mse,
        }
    }
}
