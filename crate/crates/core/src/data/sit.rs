use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng as _;

use super::{DatasetInfo, PairedDataset, Rows, TexturePair};
use crate::model::{DomainSpec, LossKind};
use crate::rng::{self, streams};
use crate::{Error, Result};

pub const CX_RANGE: (f64, f64) = (0.15, 0.85);
pub const CY_RANGE: (f64, f64) = (0.15, 0.85);
pub const R_RANGE: (f64, f64) = (0.10, 0.30);
pub const T_RANGE: (f64, f64) = (0.02, 0.10);

pub const SIT_GENERATOR: &str = "sit-v1";
pub const SIT_CLASS_NAMES: [&str; 3] = ["background", "disk", "ring"];

/// Ring geometry in unit image coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SitParams {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub t: f64,
}

fn within(v: f64, range: (f64, f64)) -> bool {
    const SLACK: f64 = 1e-12;
    v >= range.0 - SLACK && v <= range.1 + SLACK
}

fn rescale(v: f64, from: (f64, f64), to: (f64, f64)) -> f64 {
    to.0 + (v - from.0) * (to.1 - to.0) / (from.1 - from.0)
}

impl SitParams {
    pub fn new(cx: f64, cy: f64, r: f64, t: f64) -> Result<Self> {
        let p = SitParams { cx, cy, r, t };
        p.validate()?;
        Ok(p)
    }

    /// Each field must lie in its interval. Rings near the border are
    /// clipped by the image, not rejected.
    pub fn validate(&self) -> Result<()> {
        let ok = within(self.cx, CX_RANGE) && within(self.cy, CY_RANGE) && within(self.r, R_RANGE) && within(self.t, T_RANGE);
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(alloc::format!("ring parameters out of range: {self:?}")))
        }
    }

    pub fn sample(rng: &mut rng::Rng) -> Self {
        SitParams {
            cx: rng.gen_range(CX_RANGE.0..CX_RANGE.1),
            cy: rng.gen_range(CY_RANGE.0..CY_RANGE.1),
            r: rng.gen_range(R_RANGE.0..R_RANGE.1),
            t: rng.gen_range(T_RANGE.0..T_RANGE.1),
        }
    }

    /// Distance from the center of pixel `(row, col)` to the ring center.
    pub fn pixel_distance(&self, size: usize, row: usize, col: usize) -> f64 {
        let px = (col as f64 + 0.5) / size as f64;
        let py = (row as f64 + 0.5) / size as f64;
        libm::hypot(px - self.cx, py - self.cy)
    }

    pub fn in_band(&self, d: f64) -> bool {
        d >= self.r - self.t / 2.0 && d <= self.r + self.t / 2.0
    }
}

/// Exchanges the roles of position and shape: thickness drives x position,
/// radius drives y position, y position drives radius and x position drives
/// thickness, each through the affine map between the intervals.
pub fn swap_params(p: &SitParams) -> SitParams {
    SitParams {
        cx: rescale(p.t, T_RANGE, CX_RANGE),
        cy: rescale(p.r, R_RANGE, CY_RANGE),
        r: rescale(p.cy, CY_RANGE, R_RANGE),
        t: rescale(p.cx, CX_RANGE, T_RANGE),
    }
}

/// Class map drawn directly from `q`: 2 in the ring band, 1 strictly inside
/// it, 0 elsewhere.
pub fn mask_from_params(q: &SitParams, size: usize) -> Vec<u8> {
    let mut mask = Vec::with_capacity(size * size);
    for row in 0..size {
        for col in 0..size {
            let d = q.pixel_distance(size, row, col);
            mask.push(if d < q.r - q.t / 2.0 {
                1
            } else if q.in_band(d) {
                2
            } else {
                0
            });
        }
    }
    mask
}

#[derive(Debug, Clone, PartialEq)]
pub struct SitSample {
    pub params: SitParams,
    pub size: usize,
    /// `[S, S]` row-major, values in `[0, 1]`.
    pub image: Vec<f64>,
    /// `[S, S]` classes of `swap_params(params)`.
    pub mask: Vec<u8>,
}

impl SitSample {
    /// A ring that covers no pixel centers in the image or in the mask.
    pub fn is_degenerate(&self) -> bool {
        let image_band = (0..self.size * self.size)
            .any(|i| self.params.in_band(self.params.pixel_distance(self.size, i / self.size, i % self.size)));
        !image_band || !self.mask.contains(&2)
    }

    /// Mask as channel-last one-hot `[S, S, 3]`.
    pub fn mask_one_hot(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.mask.len() * 3];
        for (i, &c) in self.mask.iter().enumerate() {
            out[i * 3 + c as usize] = 1.0;
        }
        out
    }
}

/// Renders texture `a` inside the ring band of `p` over texture `b`, and
/// the class map of `swap_params(p)`. `seed` selects the texture crops.
pub fn render_sit(p: &SitParams, size: usize, textures: &TexturePair, seed: u64) -> Result<SitSample> {
    if size < 16 {
        return Err(Error::invalid("image size must be at least 16"));
    }
    p.validate()?;
    textures.check_size(size)?;
    let mut r = rng::stream(seed, streams::TEXTURE);
    let (ar, ac) = textures.a.crop_offset(size, &mut r)?;
    let (br, bc) = textures.b.crop_offset(size, &mut r)?;
    let mut image = Vec::with_capacity(size * size);
    for row in 0..size {
        for col in 0..size {
            let v = if p.in_band(p.pixel_distance(size, row, col)) {
                textures.a.at(ar + row, ac + col)
            } else {
                textures.b.at(br + row, bc + col)
            };
            image.push(v);
        }
    }
    Ok(SitSample {
        params: *p,
        size,
        image,
        mask: mask_from_params(&swap_params(p), size),
    })
}

/// Generated SIT data with the ring parameters of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct SitDataset {
    pub dataset: PairedDataset,
    pub params: Vec<SitParams>,
}

/// `n` samples with parameters drawn uniformly from their intervals.
/// Procedural textures are used unless `textures` is given.
pub fn gen_sit_dataset(n: usize, size: usize, seed: u64, textures: Option<&TexturePair>) -> Result<SitDataset> {
    if n < 10 {
        return Err(Error::invalid("a SIT dataset needs at least 10 samples"));
    }
    if size < 16 {
        return Err(Error::invalid("image size must be at least 16"));
    }
    let procedural;
    let textures = match textures {
        Some(t) => t,
        None => {
            procedural = TexturePair::procedural(size, rng::derive_seed(seed, streams::TEXTURE))?;
            &procedural
        }
    };
    textures.check_size(size)?;

    let mut params_rng = rng::stream(seed, streams::SIT_PARAMS);
    let crop_root = rng::derive_seed(seed, streams::TEXTURE);
    let mut x = Rows::empty(size * size);
    let mut y = Rows::empty(size * size * 3);
    let mut params = Vec::with_capacity(n);
    let mut resampled = 0;
    for i in 0..n {
        let sample = loop {
            let p = SitParams::sample(&mut params_rng);
            let s = render_sit(&p, size, textures, rng::derive_seed(crop_root, i as u64))?;
            if !s.is_degenerate() {
                break s;
            }
            resampled += 1;
        };
        x.push(&sample.image)?;
        y.push(&sample.mask_one_hot())?;
        params.push(sample.params);
    }
    let info = DatasetInfo {
        generator: SIT_GENERATOR.to_string(),
        seed: Some(seed),
        size: Some(size),
        class_names: SIT_CLASS_NAMES.iter().map(|s| String::from(*s)).collect(),
        eye_indices: None,
        resampled,
    };
    let dataset = PairedDataset::new(
        DomainSpec::grayscale_image("image", size),
        DomainSpec::class_map("mask", size, 3, LossKind::Bce),
        x,
        y,
        info,
    )?;
    Ok(SitDataset { dataset, params })
}
