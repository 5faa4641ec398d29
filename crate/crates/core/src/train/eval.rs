use alloc::vec::Vec;

use crate::data::{DatasetInfo, PairBank};
use crate::metrics;
use crate::model::{translate, Direction, DomainSpec, LsmModel};
use crate::{Error, Result};

/// Task metric of an `x -> y` translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskMetric {
    /// Mean IoU over non-background classes of a class-map target.
    Miou,
    /// Inter-ocular normalized landmark error.
    Nrmse { eyes: (usize, usize) },
    Mse,
}

impl TaskMetric {
    pub fn name(self) -> &'static str {
        match self {
            TaskMetric::Miou => "miou",
            TaskMetric::Nrmse { .. } => "nrmse",
            TaskMetric::Mse => "mse",
        }
    }

    pub fn maximize(self) -> bool {
        matches!(self, TaskMetric::Miou)
    }

    /// mIoU for class maps, NRMSE when eye landmarks are known, else MSE.
    pub fn for_target(y: &DomainSpec, info: &DatasetInfo) -> Self {
        if y.classes().is_some() {
            TaskMetric::Miou
        } else if let Some(eyes) = info.eye_indices {
            TaskMetric::Nrmse { eyes }
        } else {
            TaskMetric::Mse
        }
    }
}

const CHUNK: usize = 64;

/// Translates every `x` in `bank` and scores it against `y`. `None` when
/// the bank is empty or the metric is undefined on it.
pub fn evaluate(model: &LsmModel, bank: &PairBank, metric: TaskMetric) -> Result<Option<f64>> {
    if bank.is_empty() {
        return Ok(None);
    }
    let (dy, n) = (bank.y.dim(), bank.len());
    let mut pred = Vec::with_capacity(n * dy);
    let idx: Vec<usize> = (0..n).collect();
    for chunk in idx.chunks(CHUNK) {
        let x = bank.x.gather(chunk)?;
        pred.extend_from_slice(translate(model, &x, Direction::XToY)?.data());
    }
    let gt = bank.y.data();
    match metric {
        TaskMetric::Miou => {
            let classes = model
                .y
                .classes()
                .ok_or_else(|| Error::invalid("mIoU needs a class-map target domain"))?;
            let p = metrics::argmax_classes(&pred, classes)?;
            let g = metrics::argmax_classes(gt, classes)?;
            let px = dy / classes;
            metrics::mean_miou(p.chunks(px).zip(g.chunks(px)), classes, &[0])
        }
        TaskMetric::Nrmse { eyes } => {
            let mut total = 0.0;
            for (p, g) in pred.chunks(dy).zip(gt.chunks(dy)) {
                total += metrics::nrmse(p, g, eyes)?;
            }
            Ok(Some(total / n as f64))
        }
        TaskMetric::Mse => metrics::mse(&pred, gt).map(Some),
    }
}

