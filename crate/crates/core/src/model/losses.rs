//! Loss builders on a [`Graph`]. Every builder returns a scalar node holding
//! a mean over batch and elements.

use crate::autodiff::{Graph, NodeId};
use crate::model::LossKind;
use crate::nn::BoundMlp;
use crate::{Error, Result};

pub fn mse(g: &mut Graph, pred: NodeId, target: NodeId) -> Result<NodeId> {
    let d = g.sub(pred, target)?;
    let sq = g.square(d)?;
    g.mean(sq)
}

/// Mean absolute difference.
pub fn l1(g: &mut Graph, a: NodeId, b: NodeId) -> Result<NodeId> {
    let d = g.sub(a, b)?;
    let abs = g.abs(d)?;
    g.mean(abs)
}

/// `-mean(t ln p + (1 - t) ln(1 - p))` with `t` an elementwise target node.
pub fn bce(g: &mut Graph, p: NodeId, target: NodeId) -> Result<NodeId> {
    let log_p = g.log(p)?;
    let q = g.affine(p, -1.0, 1.0)?;
    let log_q = g.log(q)?;
    let one_minus_t = g.affine(target, -1.0, 1.0)?;
    let a = g.mul(target, log_p)?;
    let b = g.mul(one_minus_t, log_q)?;
    let s = g.add(a, b)?;
    let m = g.mean(s)?;
    g.affine(m, -1.0, 0.0)
}

/// BCE against a constant target shared by every element.
pub fn bce_const(g: &mut Graph, p: NodeId, target: f64) -> Result<NodeId> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::invalid("BCE target must lie in [0, 1]"));
    }
    if target == 1.0 {
        let l = g.log(p)?;
        let m = g.mean(l)?;
        return g.affine(m, -1.0, 0.0);
    }
    if target == 0.0 {
        let q = g.affine(p, -1.0, 1.0)?;
        let l = g.log(q)?;
        let m = g.mean(l)?;
        return g.affine(m, -1.0, 0.0);
    }
    let shape = g.shape(p).to_vec();
    let t = g.constant(crate::Tensor::full(&shape, target));
    bce(g, p, t)
}

/// Cross-entropy of channel-last probabilities against one-hot targets,
/// averaged over pixels.
pub fn cross_entropy(g: &mut Graph, probs: NodeId, target: NodeId, classes: usize) -> Result<NodeId> {
    let n = g.value(probs).len();
    if classes == 0 || n % classes != 0 {
        return Err(Error::invalid("element count is not a multiple of the class count"));
    }
    let log_p = g.log(probs)?;
    let picked = g.mul(target, log_p)?;
    let total = g.sum(picked)?;
    g.affine(total, -(classes as f64) / n as f64, 0.0)
}

pub fn by_kind(g: &mut Graph, kind: LossKind, pred: NodeId, target: NodeId, classes: Option<usize>) -> Result<NodeId> {
    match kind {
        LossKind::Mse => mse(g, pred, target),
        LossKind::Bce => bce(g, pred, target),
        LossKind::Ce => {
            let c = classes.ok_or_else(|| Error::invalid("cross-entropy on a domain without classes"))?;
            cross_entropy(g, pred, target, c)
        }
    }
}

/// Classifier objective: translated codes labelled 0, native codes 1.
pub fn classifier_loss(g: &mut Graph, dc: &BoundMlp, translated: NodeId, native: NodeId) -> Result<NodeId> {
    let pt = dc.forward(g, translated)?;
    let pn = dc.forward(g, native)?;
    let a = bce_const(g, pt, 0.0)?;
    let b = bce_const(g, pn, 1.0)?;
    g.add(a, b)
}

/// Confusion objective: both decisions pushed toward one half.
pub fn confusion_loss(g: &mut Graph, dc: &BoundMlp, translated: NodeId, native: NodeId) -> Result<NodeId> {
    let pt = dc.forward(g, translated)?;
    let pn = dc.forward(g, native)?;
    let a = bce_const(g, pt, 0.5)?;
    let b = bce_const(g, pn, 0.5)?;
    g.add(a, b)
}
