//! Loading user-supplied images and landmark tables.
//!
//! Landmark CSV: one row per image, `path,x0,y0,...,x{K-1},y{K-1}`, with
//! coordinates in pixels of the source image and paths relative to the CSV
//! file. A first row whose first field is `path` is a header. Images are
//! converted to grayscale and resized to `size` by `size`; coordinates are
//! divided by the source width and height.

use std::path::Path;

use image::imageops::FilterType;
use lsm_core::data::{DatasetInfo, PairedDataset, Rows, Texture, TexturePair};
use lsm_core::model::DomainSpec;

use crate::error::{LsmError, Result};

pub const CSV_GENERATOR: &str = "csv-import";

fn open_gray(path: &Path) -> Result<image::GrayImage> {
    if !path.exists() {
        return Err(LsmError::Missing(path.to_path_buf()));
    }
    let img = image::open(path).map_err(|e| LsmError::format(path, e.to_string()))?;
    Ok(img.to_luma8())
}

fn to_unit(img: &image::GrayImage) -> Vec<f64> {
    img.pixels().map(|p| f64::from(p.0[0]) / 255.0).collect()
}

/// Grayscale texture in `[0, 1]` at its native resolution.
pub fn load_texture(path: &Path) -> Result<Texture> {
    let img = open_gray(path)?;
    let (w, h) = img.dimensions();
    Texture::new(w as usize, h as usize, to_unit(&img)).map_err(|e| LsmError::format(path, e.to_string()))
}

/// Ring texture `a` and background texture `b` from two image files.
pub fn load_texture_pair(a: &Path, b: &Path) -> Result<TexturePair> {
    Ok(TexturePair {
        a: load_texture(a)?,
        b: load_texture(b)?,
    })
}

/// Reads a landmark table; `eyes` are the landmark indices used for
/// inter-ocular normalization.
pub fn import_landmarks(csv_path: &Path, size: usize, eyes: (usize, usize)) -> Result<PairedDataset> {
    if size == 0 {
        return Err(LsmError::Usage("image size must be positive".into()));
    }
    let file = std::fs::File::open(csv_path).map_err(|e| LsmError::io(csv_path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let base = csv_path.parent().unwrap_or(Path::new("."));
    let bad = |line: u64, msg: String| LsmError::format(csv_path, format!("line {line}: {msg}"));
    let mut k = None;
    let mut x = Rows::empty(size * size);
    let mut y: Option<Rows> = None;
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 1;
        let row = row.map_err(|e| bad(line, e.to_string()))?;
        if i == 0 && row.get(0) == Some("path") {
            continue;
        }
        if row.len() < 3 || row.len() % 2 == 0 {
            return Err(bad(line, format!("expected a path and x,y pairs, found {} fields", row.len())));
        }
        let kk = (row.len() - 1) / 2;
        if *k.get_or_insert(kk) != kk {
            return Err(bad(line, "landmark count differs from earlier rows".into()));
        }
        let img = open_gray(&base.join(&row[0]))?;
        let (w, h) = img.dimensions();
        let small = image::imageops::resize(&img, size as u32, size as u32, FilterType::Triangle);
        x.push(&to_unit(&small))?;
        let mut coords = Vec::with_capacity(2 * kk);
        for (j, field) in row.iter().skip(1).enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| bad(line, format!("coordinate {field:?} is not a number")))?;
            let extent = if j % 2 == 0 { w } else { h };
            let u = v / f64::from(extent);
            if !(0.0..=1.0).contains(&u) {
                return Err(bad(line, format!("coordinate {v} lies outside the image")));
            }
            coords.push(u);
        }
        y.get_or_insert_with(|| Rows::empty(2 * kk)).push(&coords)?;
    }
    let (k, y) = match (k, y) {
        (Some(k), Some(y)) => (k, y),
        _ => return Err(LsmError::format(csv_path, "no data rows")),
    };
    if eyes.0 >= k || eyes.1 >= k || eyes.0 == eyes.1 {
        return Err(LsmError::Usage(format!("eye indices {eyes:?} invalid for {k} landmarks")));
    }
    let info = DatasetInfo {
        generator: CSV_GENERATOR.into(),
        seed: None,
        size: Some(size),
        class_names: Vec::new(),
        eye_indices: Some(eyes),
        resampled: 0,
    };
    Ok(PairedDataset::new(
        DomainSpec::grayscale_image("image", size),
        DomainSpec::landmarks("landmarks", k),
        x,
        y,
        info,
    )?)
}
