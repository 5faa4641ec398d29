//! Evaluation metrics.

use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Mean intersection-over-union over the classes in `0..classes` not in
/// `excluded`. A class absent from both maps is skipped; `None` when every
/// class is skipped.
pub fn miou(pred: &[u8], gt: &[u8], classes: usize, excluded: &[u8]) -> Result<Option<f64>> {
    if pred.len() != gt.len() {
        return Err(Error::ShapeMismatch {
            op: "miou",
            left: alloc::vec![pred.len()],
            right: alloc::vec![gt.len()],
        });
    }
    if pred.iter().chain(gt).any(|&c| c as usize >= classes) {
        return Err(Error::invalid("class id out of range"));
    }
    let mut inter = alloc::vec![0usize; classes];
    let mut union = alloc::vec![0usize; classes];
    for (&p, &g) in pred.iter().zip(gt) {
        if p == g {
            inter[p as usize] += 1;
            union[p as usize] += 1;
        } else {
            union[p as usize] += 1;
            union[g as usize] += 1;
        }
    }
    let (mut sum, mut counted) = (0.0, 0usize);
    for c in 0..classes {
        if excluded.contains(&(c as u8)) || union[c] == 0 {
            continue;
        }
        sum += inter[c] as f64 / union[c] as f64;
        counted += 1;
    }
    Ok((counted > 0).then(|| sum / counted as f64))
}

/// Per-image mIoU averaged over images where it is defined.
pub fn mean_miou<'a>(pairs: impl IntoIterator<Item = (&'a [u8], &'a [u8])>, classes: usize, excluded: &[u8]) -> Result<Option<f64>> {
    let (mut sum, mut n) = (0.0, 0usize);
    for (p, g) in pairs {
        if let Some(v) = miou(p, g, classes, excluded)? {
            sum += v;
            n += 1;
        }
    }
    Ok((n > 0).then(|| sum / n as f64))
}

/// Index of the largest channel per pixel of a channel-last map. Ties go to
/// the lowest class.
pub fn argmax_classes(values: &[f64], classes: usize) -> Result<Vec<u8>> {
    if classes == 0 || classes > 256 || values.len() % classes != 0 {
        return Err(Error::invalid("channel count does not divide the map"));
    }
    Ok(values
        .chunks_exact(classes)
        .map(|px| {
            let mut best = 0;
            for (c, &v) in px.iter().enumerate() {
                if v > px[best] {
                    best = c;
                }
            }
            best as u8
        })
        .collect())
}

/// `sum_i ||pred_i - gt_i|| / (K * D)` with `D` the distance between the two
/// ground-truth eye landmarks. Points are interleaved `(x, y)`.
pub fn nrmse(pred: &[f64], gt: &[f64], eyes: (usize, usize)) -> Result<f64> {
    if pred.len() != gt.len() || gt.len() % 2 != 0 {
        return Err(Error::ShapeMismatch {
            op: "nrmse",
            left: alloc::vec![pred.len()],
            right: alloc::vec![gt.len()],
        });
    }
    let k = gt.len() / 2;
    if k < 2 || eyes.0 >= k || eyes.1 >= k || eyes.0 == eyes.1 {
        return Err(Error::invalid("nrmse needs at least two points and two distinct valid eye indices"));
    }
    let point = |v: &[f64], i: usize| (v[2 * i], v[2 * i + 1]);
    let (l, r) = (point(gt, eyes.0), point(gt, eyes.1));
    let d = libm::hypot(l.0 - r.0, l.1 - r.1);
    if !(d > 0.0) {
        return Err(Error::invalid("inter-ocular distance is zero"));
    }
    let total: f64 = (0..k)
        .map(|i| {
            let (p, g) = (point(pred, i), point(gt, i));
            libm::hypot(p.0 - g.0, p.1 - g.1)
        })
        .sum();
    Ok(total / (k as f64 * d))
}

pub fn mse(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::ShapeMismatch {
            op: "mse",
            left: alloc::vec![pred.len()],
            right: alloc::vec![target.len()],
        });
    }
    Ok(pred.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / pred.len() as f64)
}

/// One row of the metric log.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub run_id: String,
    pub config_hash: String,
    pub n_percent: u32,
    pub epoch: usize,
    pub split: String,
    pub metric: String,
    pub value: f64,
}

impl MetricRecord {
    pub fn validate(&self) -> Result<()> {
        if !self.value.is_finite() {
            return Err(Error::invalid(alloc::format!("metric {} has non-finite value", self.metric)));
        }
        if self.n_percent > 100 {
            return Err(Error::invalid("supervision level above 100%"));
        }
        Ok(())
    }
}
