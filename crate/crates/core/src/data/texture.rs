use alloc::vec::Vec;

use rand::Rng as _;

use crate::rng::Rng;
use crate::{Error, Result};

/// Grayscale texture with values in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn lattice(seed: u64, i: i64, j: i64) -> f64 {
    let h = splitmix(seed ^ splitmix((i as u64).wrapping_mul(0x1000_0000_01b3) ^ splitmix(j as u64)));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

impl Texture {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::invalid("texture data does not match its dimensions"));
        }
        if data.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::invalid("texture values must lie in [0, 1]"));
        }
        Ok(Texture { width, height, data })
    }

    /// Anisotropic value noise. Lattice cells are `period.0 x period.1`
    /// pixels along axes rotated by `angle` radians; a second octave at half
    /// the period adds detail. The result is stretched to `[lo, hi]`.
    pub fn value_noise(width: usize, height: usize, period: (f64, f64), angle: f64, range: (f64, f64), seed: u64) -> Result<Self> {
        if !(period.0 > 0.0 && period.1 > 0.0) || !(0.0 <= range.0 && range.0 < range.1 && range.1 <= 1.0) {
            return Err(Error::invalid("noise periods must be positive and the range inside [0, 1]"));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid("texture dimensions must be non-zero"));
        }
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        let octave = |u: f64, v: f64, salt: u64| {
            let (fu, fv) = (libm::floor(u), libm::floor(v));
            let (i, j) = (fu as i64, fv as i64);
            let (du, dv) = (smooth(u - fu), smooth(v - fv));
            let k = seed ^ salt;
            let top = lattice(k, i, j) * (1.0 - du) + lattice(k, i + 1, j) * du;
            let bottom = lattice(k, i, j + 1) * (1.0 - du) + lattice(k, i + 1, j + 1) * du;
            top * (1.0 - dv) + bottom * dv
        };
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                let (x, y) = (col as f64, row as f64);
                let u = (x * c + y * s) / period.0;
                let v = (-x * s + y * c) / period.1;
                data.push(0.7 * octave(u, v, 0) + 0.3 * octave(2.0 * u, 2.0 * v, 0x5bd1_e995));
            }
        }
        let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        for v in &mut data {
            let unit = (*v - lo) / span;
            *v = (range.0 + unit * (range.1 - range.0)).clamp(0.0, 1.0);
        }
        Ok(Texture { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn check_size(&self, size: usize) -> Result<()> {
        if self.width < size || self.height < size {
            return Err(Error::invalid(alloc::format!(
                "texture of {}x{} cannot be cropped to {size}x{size}",
                self.width,
                self.height
            )));
        }
        Ok(())
    }

    /// Uniformly placed `size x size` crop offset.
    pub fn crop_offset(&self, size: usize, rng: &mut Rng) -> Result<(usize, usize)> {
        self.check_size(size)?;
        Ok((rng.gen_range(0..=self.height - size), rng.gen_range(0..=self.width - size)))
    }
}

/// Ring texture `a` and background texture `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TexturePair {
    pub a: Texture,
    pub b: Texture,
}

impl TexturePair {
    /// Two procedural textures of side `2 * size` with distinct frequency,
    /// orientation and intensity statistics.
    pub fn procedural(size: usize, seed: u64) -> Result<Self> {
        let side = 2 * size;
        let scale = size as f64 / 32.0;
        let a = Texture::value_noise(
            side,
            side,
            (1.5 * scale.max(0.5), 5.0 * scale),
            core::f64::consts::FRAC_PI_4,
            (0.45, 1.0),
            crate::rng::derive_seed(seed, 1),
        )?;
        let b = Texture::value_noise(
            side,
            side,
            (8.0 * scale, 3.0 * scale),
            -core::f64::consts::FRAC_PI_6,
            (0.0, 0.6),
            crate::rng::derive_seed(seed, 2),
        )?;
        Ok(TexturePair { a, b })
    }

    pub fn check_size(&self, size: usize) -> Result<()> {
        self.a.check_size(size)?;
        self.b.check_size(size)
    }
}
