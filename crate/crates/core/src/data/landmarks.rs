use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng as _;

use super::{DatasetInfo, PairedDataset, Rows, Texture};
use crate::model::DomainSpec;
use crate::rng::{self, streams};
use crate::{Error, Result};

pub const LANDMARK_GENERATOR: &str = "faces-v1";

const HEAD: f64 = 0.8;
const MOUTH: f64 = 0.2;
/// Eyes are the only pixels at exactly zero.
const EYE: f64 = 0.0;

/// Landmark layout: eyes at indices 0 and 1, then mouth points, then points
/// on the head outline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LandmarkSpec {
    pub k: usize,
}

impl LandmarkSpec {
    pub fn new(k: usize) -> Result<Self> {
        if k < 4 {
            return Err(Error::invalid("at least 4 landmarks are required"));
        }
        Ok(LandmarkSpec { k })
    }

    pub fn eye_indices(&self) -> (usize, usize) {
        (0, 1)
    }

    pub fn mouth_points(&self) -> usize {
        (self.k - 3).min(3)
    }

    pub fn head_points(&self) -> usize {
        self.k - 2 - self.mouth_points()
    }
}

/// Geometry of one procedural face in unit coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceParams {
    pub head_x: f64,
    pub head_y: f64,
    pub head_rx: f64,
    pub head_ry: f64,
    /// Horizontal offset of each eye from the head center.
    pub eye_dx: f64,
    /// Height of the eyes above the head center.
    pub eye_dy: f64,
    pub eye_r: f64,
    /// Depth of the mouth corners below the head center.
    pub mouth_dy: f64,
    pub mouth_half_width: f64,
    /// Vertical offset of the mouth center relative to its corners.
    pub mouth_curve: f64,
}

impl FaceParams {
    pub fn sample(rng: &mut rng::Rng) -> Self {
        let head_rx = rng.gen_range(0.25..0.35);
        let head_ry = rng.gen_range(0.30..0.40);
        FaceParams {
            head_x: rng.gen_range(0.40..0.60),
            head_y: rng.gen_range(0.40..0.60),
            head_rx,
            head_ry,
            eye_dx: rng.gen_range(0.30..0.45) * head_rx,
            eye_dy: rng.gen_range(0.15..0.35) * head_ry,
            eye_r: rng.gen_range(0.040..0.055),
            mouth_dy: rng.gen_range(0.35..0.55) * head_ry,
            mouth_half_width: rng.gen_range(0.25..0.45) * head_rx,
            mouth_curve: rng.gen_range(-0.06..0.06),
        }
    }

    pub fn eyes(&self) -> [(f64, f64); 2] {
        let y = self.head_y - self.eye_dy;
        [(self.head_x - self.eye_dx, y), (self.head_x + self.eye_dx, y)]
    }

    /// Mouth arc at `u` in `[-1, 1]`, corners at the ends.
    pub fn mouth_at(&self, u: f64) -> (f64, f64) {
        (
            self.head_x + u * self.mouth_half_width,
            self.head_y + self.mouth_dy + self.mouth_curve * (1.0 - u * u),
        )
    }

    pub fn landmarks(&self, spec: LandmarkSpec) -> Vec<f64> {
        let mut out = Vec::with_capacity(spec.k * 2);
        for (x, y) in self.eyes() {
            out.extend([x, y]);
        }
        let mouth: &[f64] = match spec.mouth_points() {
            1 => &[0.0],
            2 => &[-1.0, 1.0],
            _ => &[-1.0, 0.0, 1.0],
        };
        for &u in mouth {
            let (x, y) = self.mouth_at(u);
            out.extend([x, y]);
        }
        let h = spec.head_points();
        for i in 0..h {
            // Start at the chin and walk around the outline.
            let a = PI / 2.0 + 2.0 * PI * i as f64 / h as f64;
            out.extend([
                self.head_x + self.head_rx * libm::cos(a),
                self.head_y + self.head_ry * libm::sin(a),
            ]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSample {
    pub params: FaceParams,
    pub size: usize,
    /// `[S, S]` row-major, values in `[0, 1]`.
    pub image: Vec<f64>,
    /// `[K, 2]` as `(x, y)` pairs in unit coordinates.
    pub landmarks: Vec<f64>,
}

/// Draws a face over `background`: head ellipse, mouth arc, then two eyes.
pub fn render_face(p: &FaceParams, spec: LandmarkSpec, size: usize, background: &Texture) -> Result<LandmarkSample> {
    background.check_size(size)?;
    let arc: Vec<(f64, f64)> = (0..=64).map(|i| p.mouth_at(-1.0 + i as f64 / 32.0)).collect();
    let mouth_w = (0.6 / size as f64).max(0.015);
    let eyes = p.eyes();
    let mut image = Vec::with_capacity(size * size);
    for row in 0..size {
        for col in 0..size {
            let x = (col as f64 + 0.5) / size as f64;
            let y = (row as f64 + 0.5) / size as f64;
            let mut v = background.at(row, col);
            let (ex, ey) = ((x - p.head_x) / p.head_rx, (y - p.head_y) / p.head_ry);
            if ex * ex + ey * ey <= 1.0 {
                v = HEAD;
            }
            if arc.iter().any(|&(ax, ay)| libm::hypot(x - ax, y - ay) <= mouth_w) {
                v = MOUTH;
            }
            if eyes.iter().any(|&(cx, cy)| libm::hypot(x - cx, y - cy) <= p.eye_r) {
                v = EYE;
            }
            image.push(v);
        }
    }
    Ok(LandmarkSample {
        params: *p,
        size,
        image,
        landmarks: p.landmarks(spec),
    })
}

/// `n` procedural faces of side `size` with `k` landmarks each.
pub fn gen_landmark_dataset(n: usize, size: usize, k: usize, seed: u64) -> Result<PairedDataset> {
    let spec = LandmarkSpec::new(k)?;
    if n == 0 {
        return Err(Error::invalid("dataset must contain at least one sample"));
    }
    if size < 16 {
        return Err(Error::invalid("image size must be at least 16"));
    }
    let background = Texture::value_noise(
        2 * size,
        2 * size,
        (size as f64 / 4.0, size as f64 / 4.0),
        0.0,
        (0.3, 0.5),
        rng::derive_seed(seed, streams::TEXTURE),
    )?;
    let mut r = rng::stream(seed, streams::LANDMARKS);
    let mut x = Rows::empty(size * size);
    let mut y = Rows::empty(k * 2);
    for _ in 0..n {
        let p = FaceParams::sample(&mut r);
        let (row0, col0) = background.crop_offset(size, &mut r)?;
        let crop: Vec<f64> = (0..size)
            .flat_map(|row| (0..size).map(move |col| (row, col)))
            .map(|(row, col)| background.at(row0 + row, col0 + col))
            .collect();
        let crop = Texture::new(size, size, crop)?;
        let s = render_face(&p, spec, size, &crop)?;
        x.push(&s.image)?;
        y.push(&s.landmarks)?;
    }
    let info = DatasetInfo {
        generator: LANDMARK_GENERATOR.to_string(),
        seed: Some(seed),
        size: Some(size),
        class_names: Vec::new(),
        eye_indices: Some(spec.eye_indices()),
        resampled: 0,
    };
    PairedDataset::new(
        DomainSpec::grayscale_image("image", size),
        DomainSpec::landmarks("landmarks", k),
        x,
        y,
        info,
    )
}
