use alloc::vec;
use alloc::vec::Vec;

use super::losses;
use super::{Batch, BatchKind, DomainSpec};
use crate::autodiff::{Graph, NodeId};
use crate::nn::{BoundMlp, Mlp, OutputActivation};
use crate::{rng, Error, Result, Tensor};

/// The eight networks of a two-domain model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Net {
    EncoderX,
    EncoderY,
    DecoderX,
    DecoderY,
    /// Maps X codes into the Y latent space.
    LinkXY,
    /// Maps Y codes into the X latent space.
    LinkYX,
    /// Decides whether an X-space code is native or translated.
    ClassifierX,
    ClassifierY,
}

impl Net {
    pub const ALL: [Net; 8] = [
        Net::EncoderX,
        Net::EncoderY,
        Net::DecoderX,
        Net::DecoderY,
        Net::LinkXY,
        Net::LinkYX,
        Net::ClassifierX,
        Net::ClassifierY,
    ];
    /// Networks updated on the main loss.
    pub const MAIN: [Net; 6] = [
        Net::EncoderX,
        Net::EncoderY,
        Net::DecoderX,
        Net::DecoderY,
        Net::LinkXY,
        Net::LinkYX,
    ];
    /// Networks updated on the adversarial loss.
    pub const CLASSIFIERS: [Net; 2] = [Net::ClassifierX, Net::ClassifierY];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Net::EncoderX => "encoder_x",
            Net::EncoderY => "encoder_y",
            Net::DecoderX => "decoder_x",
            Net::DecoderY => "decoder_y",
            Net::LinkXY => "link_xy",
            Net::LinkYX => "link_yx",
            Net::ClassifierX => "classifier_x",
            Net::ClassifierY => "classifier_y",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub latent_dim: usize,
    /// Encoder hidden sizes; decoders mirror them.
    pub encoder_hidden: Vec<usize>,
    /// Hidden layers of width `latent_dim` in each link network.
    pub link_hidden_layers: usize,
    pub classifier_hidden: Vec<usize>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            latent_dim: 64,
            encoder_hidden: vec![512, 256],
            link_hidden_layers: 1,
            classifier_hidden: vec![128],
        }
    }
}

/// Weights of the main objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub recon_x: f64,
    pub recon_y: f64,
    pub sup_xy: f64,
    pub sup_yx: f64,
    pub distance: f64,
    pub confusion: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self::lsm()
    }
}

impl LossWeights {
    /// Every term on with unit weight.
    pub fn lsm() -> Self {
        LossWeights {
            recon_x: 1.0,
            recon_y: 1.0,
            sup_xy: 1.0,
            sup_yx: 1.0,
            distance: 1.0,
            confusion: 1.0,
        }
    }

    /// Supervised translation only.
    pub fn basic() -> Self {
        LossWeights {
            recon_x: 0.0,
            recon_y: 0.0,
            distance: 0.0,
            confusion: 0.0,
            ..Self::lsm()
        }
    }

    /// Supervised translation regularized by reconstruction.
    pub fn sop() -> Self {
        LossWeights {
            distance: 0.0,
            confusion: 0.0,
            ..Self::lsm()
        }
    }

    pub fn zero() -> Self {
        LossWeights {
            recon_x: 0.0,
            recon_y: 0.0,
            sup_xy: 0.0,
            sup_yx: 0.0,
            distance: 0.0,
            confusion: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.recon_x,
            self.recon_y,
            self.sup_xy,
            self.sup_yx,
            self.distance,
            self.confusion,
        ];
        if all.iter().all(|w| w.is_finite() && *w >= 0.0) {
            Ok(())
        } else {
            Err(Error::invalid("loss weights must be finite and non-negative"))
        }
    }

    pub fn weight(&self, term: Term) -> f64 {
        match term {
            Term::ReconX => self.recon_x,
            Term::ReconY => self.recon_y,
            Term::SupXY => self.sup_xy,
            Term::SupYX => self.sup_yx,
            Term::DistX | Term::DistY => self.distance,
            Term::ConfX | Term::ConfY => self.confusion,
            Term::ClassifierX | Term::ClassifierY => 0.0,
        }
    }
}

/// Individual loss terms, as logged in training history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    ReconX,
    ReconY,
    SupXY,
    SupYX,
    /// Distance in X space: `d(L_yx(E_y(y)), E_x(x))`.
    DistX,
    /// Distance in Y space: `d(L_xy(E_x(x)), E_y(y))`.
    DistY,
    ConfX,
    ConfY,
    ClassifierX,
    ClassifierY,
}

impl Term {
    pub const ALL: [Term; 10] = [
        Term::ReconX,
        Term::ReconY,
        Term::SupXY,
        Term::SupYX,
        Term::DistX,
        Term::DistY,
        Term::ConfX,
        Term::ConfY,
        Term::ClassifierX,
        Term::ClassifierY,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Term::ReconX => "recon_x",
            Term::ReconY => "recon_y",
            Term::SupXY => "sup_xy",
            Term::SupYX => "sup_yx",
            Term::DistX => "dist_x",
            Term::DistY => "dist_y",
            Term::ConfX => "conf_x",
            Term::ConfY => "conf_y",
            Term::ClassifierX => "dc_x",
            Term::ClassifierY => "dc_y",
        }
    }

    pub fn is_adversarial(self) -> bool {
        matches!(self, Term::ClassifierX | Term::ClassifierY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    XToY,
    YToX,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsmModel {
    pub x: DomainSpec,
    pub y: DomainSpec,
    pub config: ModelConfig,
    nets: Vec<Mlp>,
}

impl LsmModel {
    pub fn new(x: DomainSpec, y: DomainSpec, config: ModelConfig, seed: u64) -> Result<Self> {
        x.validate()?;
        y.validate()?;
        let latent = config.latent_dim;
        if latent == 0 {
            return Err(Error::invalid("latent dimension must be positive"));
        }
        let encoder = |d: &DomainSpec| {
            let mut dims = vec![d.dim()];
            dims.extend(&config.encoder_hidden);
            dims.push(latent);
            dims
        };
        let decoder = |d: &DomainSpec| {
            let mut dims = encoder(d);
            dims.reverse();
            dims
        };
        let link = vec![latent; config.link_hidden_layers + 2];
        let classifier = {
            let mut dims = vec![latent];
            dims.extend(&config.classifier_hidden);
            dims.push(1);
            dims
        };
        let nets = Net::ALL
            .iter()
            .map(|&net| {
                let (dims, act) = match net {
                    Net::EncoderX => (encoder(&x), OutputActivation::Identity),
                    Net::EncoderY => (encoder(&y), OutputActivation::Identity),
                    Net::DecoderX => (decoder(&x), x.decoder_activation()),
                    Net::DecoderY => (decoder(&y), y.decoder_activation()),
                    Net::LinkXY | Net::LinkYX => (link.clone(), OutputActivation::Identity),
                    Net::ClassifierX | Net::ClassifierY => (classifier.clone(), OutputActivation::Sigmoid),
                };
                Mlp::new(&dims, act, rng::derive_seed(seed, 100 + net.index() as u64))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LsmModel { x, y, config, nets })
    }

    /// Rebuilds a model from stored networks, checking the dimension chain.
    pub fn from_nets(x: DomainSpec, y: DomainSpec, config: ModelConfig, nets: Vec<Mlp>) -> Result<Self> {
        let reference = Self::new(x, y, config, 0)?;
        if nets.len() != Net::ALL.len() {
            return Err(Error::invalid("a model has exactly eight networks"));
        }
        for (net, (got, want)) in Net::ALL.iter().zip(nets.iter().zip(&reference.nets)) {
            if got.dims() != want.dims() || got.output() != want.output() {
                return Err(Error::invalid(alloc::format!(
                    "{} has dims {:?}, expected {:?}",
                    net.name(),
                    got.dims(),
                    want.dims()
                )));
            }
        }
        Ok(LsmModel { nets, ..reference })
    }

    pub fn net(&self, net: Net) -> &Mlp {
        &self.nets[net.index()]
    }

    pub fn net_mut(&mut self, net: Net) -> &mut Mlp {
        &mut self.nets[net.index()]
    }

    pub fn nets(&self) -> &[Mlp] {
        &self.nets
    }

    pub fn latent_dim(&self) -> usize {
        self.config.latent_dim
    }

    pub fn param_count(&self) -> usize {
        self.nets.iter().map(Mlp::param_count).sum()
    }

    /// Parameters of `nets` in order, each network in `w0, b0, ...` order.
    pub fn params_mut(&mut self, nets: &[Net]) -> Vec<&mut Tensor> {
        let mut out = Vec::new();
        for (i, mlp) in self.nets.iter_mut().enumerate() {
            if nets.iter().any(|n| n.index() == i) {
                out.extend(mlp.params_mut());
            }
        }
        out
    }

    /// All parameters of `nets` flattened into one vector.
    pub fn flat_params(&self, nets: &[Net]) -> Vec<f64> {
        let mut out = Vec::new();
        for net in sorted(nets) {
            for p in self.net(net).params() {
                out.extend_from_slice(p.data());
            }
        }
        out
    }

    pub fn set_flat_params(&mut self, nets: &[Net], values: &[f64]) -> Result<()> {
        let mut offset = 0;
        for net in sorted(nets) {
            for p in self.net_mut(net).params_mut() {
                let n = p.len();
                let chunk = values
                    .get(offset..offset + n)
                    .ok_or_else(|| Error::invalid("flat parameter vector too short"))?;
                p.data_mut().copy_from_slice(chunk);
                offset += n;
            }
        }
        if offset != values.len() {
            return Err(Error::invalid("flat parameter vector too long"));
        }
        Ok(())
    }

    pub(crate) fn spec(&self, dir: Direction) -> (&DomainSpec, &DomainSpec) {
        match dir {
            Direction::XToY => (&self.x, &self.y),
            Direction::YToX => (&self.y, &self.x),
        }
    }
}

fn sorted(nets: &[Net]) -> Vec<Net> {
    let mut v = nets.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Graph under construction for one model. Networks are bound lazily, so a
/// graph only holds the parameters its losses touch.
pub struct Session<'m> {
    model: &'m LsmModel,
    pub graph: Graph,
    trainable: bool,
    bound: [Option<BoundMlp>; 8],
    frozen_classifiers: [Option<BoundMlp>; 2],
}

impl<'m> Session<'m> {
    /// With `trainable == false` every parameter is a constant.
    pub fn new(model: &'m LsmModel, trainable: bool) -> Self {
        Session {
            model,
            graph: Graph::new(),
            trainable,
            bound: Default::default(),
            frozen_classifiers: Default::default(),
        }
    }

    pub fn model(&self) -> &'m LsmModel {
        self.model
    }

    fn bound(&mut self, net: Net) -> BoundMlp {
        let slot = &mut self.bound[net.index()];
        if slot.is_none() {
            *slot = Some(self.model.net(net).bind(&mut self.graph, self.trainable));
        }
        slot.clone().expect("bound above")
    }

    /// Classifier copy whose parameters are constants, used by the
    /// confusion term so that it cannot move the classifiers.
    fn frozen(&mut self, net: Net) -> BoundMlp {
        let idx = net.index() - Net::ClassifierX.index();
        if self.frozen_classifiers[idx].is_none() {
            self.frozen_classifiers[idx] = Some(self.model.net(net).bind(&mut self.graph, false));
        }
        self.frozen_classifiers[idx].clone().expect("bound above")
    }

    pub fn apply(&mut self, net: Net, input: NodeId) -> Result<NodeId> {
        let b = self.bound(net);
        b.forward(&mut self.graph, input)
    }

    pub fn input(&mut self, t: &Tensor) -> NodeId {
        self.graph.constant(t.clone())
    }

    /// Parameter nodes of `net`, if it has been bound.
    pub fn param_nodes(&self, net: Net) -> Option<Vec<NodeId>> {
        self.bound[net.index()].as_ref().map(|b| b.param_nodes().collect())
    }

    /// Moves the gradients for the parameters of `nets` out of `grads`, in
    /// [`LsmModel::params_mut`] order; `None` for networks never bound.
    pub fn collect_grads(&self, grads: &mut crate::autodiff::Gradients, nets: &[Net]) -> Vec<Option<Vec<f64>>> {
        let mut out = Vec::new();
        for net in sorted(nets) {
            let count = self.model.net(net).params().count();
            match self.param_nodes(net) {
                Some(nodes) => out.extend(nodes.iter().map(|&id| grads.take(id))),
                None => out.extend((0..count).map(|_| None)),
            }
        }
        out
    }

    /// Builds every term the batch mix and weights call for.
    ///
    /// Paired batches feed supervised, reconstruction and distance terms.
    /// Unpaired batches feed reconstruction, and when both an x-only and a
    /// y-only batch are present, confusion (if weighted) and classifier
    /// terms (if `train_classifiers`). Terms with zero weight are not built.
    pub fn build_step(&mut self, w: &LossWeights, batches: &[Batch], train_classifiers: bool) -> Result<StepGraph> {
        w.validate()?;
        let (mut paired, mut only_x, mut only_y) = (None, None, None);
        for b in batches {
            let slot = match b.kind() {
                BatchKind::PairedXY => &mut paired,
                BatchKind::OnlyX => &mut only_x,
                BatchKind::OnlyY => &mut only_y,
            };
            if slot.replace(b).is_some() {
                return Err(Error::invalid(alloc::format!(
                    "at most one {} batch per step",
                    b.kind().name()
                )));
            }
        }
        let model = self.model;
        let (cx, cy) = (model.x.classes(), model.y.classes());
        let mut terms: Vec<(Term, NodeId)> = Vec::new();
        let mut recon_x = Vec::new();
        let mut recon_y = Vec::new();

        if let Some(p) = paired {
            let x = self.input(p.x().expect("paired"));
            let y = self.input(p.y().expect("paired"));
            let need_x = w.sup_xy > 0.0 || w.recon_x > 0.0 || w.distance > 0.0;
            let need_y = w.sup_yx > 0.0 || w.recon_y > 0.0 || w.distance > 0.0;
            let xl = if need_x { Some(self.apply(Net::EncoderX, x)?) } else { None };
            let yl = if need_y { Some(self.apply(Net::EncoderY, y)?) } else { None };
            let mut x_in_y = None;
            let mut y_in_x = None;
            if w.sup_xy > 0.0 {
                let t = self.apply(Net::LinkXY, xl.expect("need_x"))?;
                x_in_y = Some(t);
                let pred = self.apply(Net::DecoderY, t)?;
                let l = losses::by_kind(&mut self.graph, model.y.translation_loss, pred, y, cy)?;
                terms.push((Term::SupXY, l));
            }
            if w.sup_yx > 0.0 {
                let t = self.apply(Net::LinkYX, yl.expect("need_y"))?;
                y_in_x = Some(t);
                let pred = self.apply(Net::DecoderX, t)?;
                let l = losses::by_kind(&mut self.graph, model.x.translation_loss, pred, x, cx)?;
                terms.push((Term::SupYX, l));
            }
            if w.recon_x > 0.0 {
                let r = self.apply(Net::DecoderX, xl.expect("need_x"))?;
                recon_x.push(losses::by_kind(&mut self.graph, model.x.recon_loss, r, x, cx)?);
            }
            if w.recon_y > 0.0 {
                let r = self.apply(Net::DecoderY, yl.expect("need_y"))?;
                recon_y.push(losses::by_kind(&mut self.graph, model.y.recon_loss, r, y, cy)?);
            }
            if w.distance > 0.0 {
                let (xl, yl) = (xl.expect("need_x"), yl.expect("need_y"));
                let t = match x_in_y {
                    Some(t) => t,
                    None => self.apply(Net::LinkXY, xl)?,
                };
                let dy = losses::l1(&mut self.graph, t, yl)?;
                let t = match y_in_x {
                    Some(t) => t,
                    None => self.apply(Net::LinkYX, yl)?,
                };
                let dx = losses::l1(&mut self.graph, t, xl)?;
                terms.push((Term::DistX, dx));
                terms.push((Term::DistY, dy));
            }
        }

        let adversarial = only_x.is_some() && only_y.is_some() && (w.confusion > 0.0 || train_classifiers);
        let mut ux = None;
        if let Some(b) = only_x {
            let x = self.input(b.x().expect("x-only"));
            if w.recon_x > 0.0 || adversarial {
                let xl = self.apply(Net::EncoderX, x)?;
                ux = Some(xl);
                if w.recon_x > 0.0 {
                    let r = self.apply(Net::DecoderX, xl)?;
                    recon_x.push(losses::by_kind(&mut self.graph, model.x.recon_loss, r, x, cx)?);
                }
            }
        }
        let mut uy = None;
        if let Some(b) = only_y {
            let y = self.input(b.y().expect("y-only"));
            if w.recon_y > 0.0 || adversarial {
                let yl = self.apply(Net::EncoderY, y)?;
                uy = Some(yl);
                if w.recon_y > 0.0 {
                    let r = self.apply(Net::DecoderY, yl)?;
                    recon_y.push(losses::by_kind(&mut self.graph, model.y.recon_loss, r, y, cy)?);
                }
            }
        }
        for (term, parts) in [(Term::ReconX, recon_x), (Term::ReconY, recon_y)] {
            match parts.as_slice() {
                [] => {}
                [one] => terms.push((term, *one)),
                [a, b] => {
                    let s = self.graph.add(*a, *b)?;
                    terms.push((term, self.graph.affine(s, 0.5, 0.0)?));
                }
                _ => unreachable!("at most two reconstruction sources"),
            }
        }

        let mut adv_terms = Vec::new();
        if adversarial {
            let (xl, yl) = (ux.expect("adversarial"), uy.expect("adversarial"));
            // Codes translated into Y space and native Y codes, and mirrored.
            let into_y = self.apply(Net::LinkXY, xl)?;
            let into_x = self.apply(Net::LinkYX, yl)?;
            if w.confusion > 0.0 {
                let dc_y = self.frozen(Net::ClassifierY);
                let cy = losses::confusion_loss(&mut self.graph, &dc_y, into_y, yl)?;
                let dc_x = self.frozen(Net::ClassifierX);
                let cx = losses::confusion_loss(&mut self.graph, &dc_x, into_x, xl)?;
                terms.push((Term::ConfX, cx));
                terms.push((Term::ConfY, cy));
            }
            if train_classifiers {
                let (ty, ny) = (self.graph.detach(into_y)?, self.graph.detach(yl)?);
                let (tx, nx) = (self.graph.detach(into_x)?, self.graph.detach(xl)?);
                let dc_y = self.bound(Net::ClassifierY);
                let ly = losses::classifier_loss(&mut self.graph, &dc_y, ty, ny)?;
                let dc_x = self.bound(Net::ClassifierX);
                let lx = losses::classifier_loss(&mut self.graph, &dc_x, tx, nx)?;
                adv_terms.push((Term::ClassifierX, lx));
                adv_terms.push((Term::ClassifierY, ly));
            }
        }

        let weighted: Vec<(f64, NodeId)> = terms.iter().map(|&(t, id)| (w.weight(t), id)).collect();
        let main = if weighted.is_empty() {
            None
        } else {
            Some(self.graph.weighted_sum(&weighted)?)
        };
        let adversarial = match adv_terms.as_slice() {
            [] => None,
            [(_, a), (_, b)] => Some(self.graph.add(*a, *b)?),
            _ => unreachable!(),
        };
        terms.extend(adv_terms);
        Ok(StepGraph {
            main,
            adversarial,
            terms,
        })
    }
}

/// Node ids of one training step's objectives.
#[derive(Debug, Clone)]
pub struct StepGraph {
    pub main: Option<NodeId>,
    pub adversarial: Option<NodeId>,
    pub terms: Vec<(Term, NodeId)>,
}

impl StepGraph {
    pub fn term(&self, t: Term) -> Option<NodeId> {
        self.terms.iter().find(|(k, _)| *k == t).map(|&(_, id)| id)
    }
}

/// `D_y(L_xy(E_x(x)))`, or the mirror for `YToX`.
///
/// `x` is `[batch, ...]` with one flattened item per row or the source's
/// item shape after the batch axis. The output is `[batch, ...]` in the
/// target's item shape.
pub fn translate(model: &LsmModel, x: &Tensor, dir: Direction) -> Result<Tensor> {
    let (src, dst) = model.spec(dir);
    let shape = x.shape();
    let batch = shape[0];
    let item = &shape[1..];
    let ok = item == [src.dim()] || item == src.item_shape().as_slice();
    if !ok {
        let mut want = vec![batch];
        want.extend(src.item_shape());
        return Err(Error::ShapeMismatch {
            op: "translate",
            left: shape.to_vec(),
            right: want,
        });
    }
    let (enc, link, dec) = match dir {
        Direction::XToY => (Net::EncoderX, Net::LinkXY, Net::DecoderY),
        Direction::YToX => (Net::EncoderY, Net::LinkYX, Net::DecoderX),
    };
    let mut s = Session::new(model, false);
    let flat = x.clone().reshape(&[batch, src.dim()])?;
    let input = s.input(&flat);
    let l = s.apply(enc, input)?;
    let t = s.apply(link, l)?;
    let out = s.apply(dec, t)?;
    let mut out_shape = vec![batch];
    out_shape.extend(dst.item_shape());
    s.graph.tensor(out).reshape(&out_shape)
}

fn expect_kind(batch: &Batch, kind: BatchKind) -> Result<()> {
    if batch.kind() == kind {
        Ok(())
    } else {
        Err(Error::WrongBatchKind {
            expected: kind.name(),
            found: batch.kind().name(),
        })
    }
}

fn eval_terms(model: &LsmModel, w: &LossWeights, batches: &[Batch], classifiers: bool) -> Result<(Graph, StepGraph)> {
    let mut s = Session::new(model, false);
    let step = s.build_step(w, batches, classifiers)?;
    Ok((s.graph, step))
}

fn term_value(g: &Graph, step: &StepGraph, t: Term) -> Option<f64> {
    step.term(t).and_then(|id| g.scalar(id))
}

/// `(L_xy, L_yx)`: supervised translation loss in both directions.
pub fn supervised_translation_loss(model: &LsmModel, batch: &Batch) -> Result<(f64, f64)> {
    expect_kind(batch, BatchKind::PairedXY)?;
    let w = LossWeights {
        sup_xy: 1.0,
        sup_yx: 1.0,
        ..LossWeights::zero()
    };
    let (g, step) = eval_terms(model, &w, core::slice::from_ref(batch), false)?;
    Ok((
        term_value(&g, &step, Term::SupXY).expect("built"),
        term_value(&g, &step, Term::SupYX).expect("built"),
    ))
}

/// Reconstruction losses; a side is `None` when the batch lacks that view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub x: Option<f64>,
    pub y: Option<f64>,
}

pub fn reconstruction_loss(model: &LsmModel, batch: &Batch) -> Result<Reconstruction> {
    let w = LossWeights {
        recon_x: 1.0,
        recon_y: 1.0,
        ..LossWeights::zero()
    };
    let (g, step) = eval_terms(model, &w, core::slice::from_ref(batch), false)?;
    Ok(Reconstruction {
        x: term_value(&g, &step, Term::ReconX),
        y: term_value(&g, &step, Term::ReconY),
    })
}

/// `(Dist_y, Dist_x)`: L1 between translated and native codes in Y space,
/// and the mirror in X space.
pub fn latent_distance_loss(model: &LsmModel, batch: &Batch) -> Result<(f64, f64)> {
    expect_kind(batch, BatchKind::PairedXY)?;
    let w = LossWeights {
        distance: 1.0,
        ..LossWeights::zero()
    };
    let (g, step) = eval_terms(model, &w, core::slice::from_ref(batch), false)?;
    Ok((
        term_value(&g, &step, Term::DistY).expect("built"),
        term_value(&g, &step, Term::DistX).expect("built"),
    ))
}

fn unpaired_pair(x_batch: &Batch, y_batch: &Batch) -> Result<[Batch; 2]> {
    if x_batch.x().is_none() {
        return Err(Error::EmptyBatch("x side"));
    }
    if y_batch.y().is_none() {
        return Err(Error::EmptyBatch("y side"));
    }
    Ok([
        Batch::only_x(x_batch.x().expect("checked").clone())?,
        Batch::only_y(y_batch.y().expect("checked").clone())?,
    ])
}

/// `(L_DC_y, L_DC_x)` on codes of an x-only and a y-only batch.
pub fn domain_classifier_loss(model: &LsmModel, x_batch: &Batch, y_batch: &Batch) -> Result<(f64, f64)> {
    let batches = unpaired_pair(x_batch, y_batch)?;
    let (g, step) = eval_terms(model, &LossWeights::zero(), &batches, true)?;
    Ok((
        term_value(&g, &step, Term::ClassifierY).expect("built"),
        term_value(&g, &step, Term::ClassifierX).expect("built"),
    ))
}

/// `(Conf_y, Conf_x)` on codes of an x-only and a y-only batch.
pub fn confusion_loss(model: &LsmModel, x_batch: &Batch, y_batch: &Batch) -> Result<(f64, f64)> {
    let batches = unpaired_pair(x_batch, y_batch)?;
    let w = LossWeights {
        confusion: 1.0,
        ..LossWeights::zero()
    };
    let (g, step) = eval_terms(model, &w, &batches, false)?;
    Ok((
        term_value(&g, &step, Term::ConfY).expect("built"),
        term_value(&g, &step, Term::ConfX).expect("built"),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    /// Weighted main objective; zero when no term is active.
    pub main: f64,
    /// Sum of classifier losses, when classifiers are trained this step.
    pub adversarial: Option<f64>,
    /// Unweighted value of every term that was built.
    pub terms: Vec<(Term, f64)>,
    /// All weights are zero and no classifier update was requested.
    pub degenerate: bool,
}

pub fn final_loss(model: &LsmModel, w: &LossWeights, batches: &[Batch], train_classifiers: bool) -> Result<LossReport> {
    let (g, step) = eval_terms(model, w, batches, train_classifiers)?;
    let degenerate = *w == LossWeights::zero() && !train_classifiers;
    Ok(LossReport {
        main: step.main.and_then(|id| g.scalar(id)).unwrap_or(0.0),
        adversarial: step.adversarial.and_then(|id| g.scalar(id)),
        terms: step
            .terms
            .iter()
            .map(|&(t, id)| (t, g.scalar(id).expect("scalar term")))
            .collect(),
        degenerate,
    })
}
