//! Reverse-mode automatic differentiation over dense `f64` tensors.
//!
//! A [`Graph`] is a tape: every operation evaluates its forward value
//! eagerly and appends a node. Node ids are handed out in creation order, so
//! the tape is topologically sorted by construction and [`Graph::backward`]
//! is a single reverse sweep.
//!
//! ```
//! use lsm_core::autodiff::Graph;
//! use lsm_core::Tensor;
//!
//! let mut g = Graph::new();
//! let w = g.leaf(Tensor::scalar(3.0));
//! let sq = g.square(w).unwrap();
//! let loss = g.sum(sq).unwrap();
//! let grads = g.backward(loss).unwrap();
//! assert_eq!(grads.get(w).unwrap(), &[6.0]);
//! ```

mod gradcheck;

pub use gradcheck::{finite_diff_check, GradCheckReport};

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{gemm, MatRef};
use crate::tensor::numel;
use crate::{Error, Result, Tensor};

/// Inputs to `log` below this value are clamped to it.
pub const LOG_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Operation kinds accepted by [`Graph::apply`].
#[derive(Debug, Clone, PartialEq)]
pub enum OpKind {
    /// `[m,k] x [k,n]`.
    MatMul,
    /// `[m,k] x [n,k]^T`, the layout of a linear layer's weight.
    MatMulTransB,
    /// Adds the second input, whose shape is a suffix of the first's.
    AddBroadcast,
    Sub,
    Mul,
    /// `scale * x + shift`.
    Affine { scale: f64, shift: f64 },
    Relu,
    Sigmoid,
    Tanh,
    Reshape(Vec<usize>),
    Concat { axis: usize },
    /// Softmax over the last axis.
    Softmax,
    Mean,
    Sum,
    Abs,
    Square,
    /// Natural log with inputs clamped at [`LOG_EPSILON`].
    Log,
}

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    Constant,
    MatMul { a: NodeId, b: NodeId, trans_b: bool },
    AddBroadcast(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Affine { a: NodeId, scale: f64 },
    Relu(NodeId),
    Sigmoid(NodeId),
    Tanh(NodeId),
    Reshape(NodeId),
    Concat { inputs: Vec<NodeId>, axis: usize },
    Softmax(NodeId),
    Mean(NodeId),
    Sum(NodeId),
    Abs(NodeId),
    Square(NodeId),
    /// Clamped positions receive no gradient.
    Log { a: NodeId, clamped: Vec<usize> },
}

#[derive(Debug, Clone)]
struct Node {
    op: Op,
    shape: Vec<usize>,
    data: Vec<f64>,
    requires_grad: bool,
}

/// Computation tape. Confined to one thread; distinct graphs are independent.
#[derive(Debug, Default, Clone)]
pub struct Graph {
    nodes: Vec<Node>,
    clamp_events: usize,
}

/// Result of a backward sweep: gradient of the loss for each node that
/// requires one.
#[derive(Debug, Clone)]
pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    pub fn get(&self, id: NodeId) -> Option<&[f64]> {
        self.grads.get(id.0).and_then(|g| g.as_deref())
    }

    pub fn take(&mut self, id: NodeId) -> Option<Vec<f64>> {
        self.grads.get_mut(id.0).and_then(|g| g.take())
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of elements clamped by `log` so far.
    pub fn clamp_events(&self) -> usize {
        self.clamp_events
    }

    /// Registers a tensor; it is differentiable iff `tensor.requires_grad`.
    pub fn input(&mut self, tensor: Tensor) -> NodeId {
        let requires_grad = tensor.requires_grad;
        let shape = tensor.shape().to_vec();
        let op = if requires_grad { Op::Leaf } else { Op::Constant };
        self.push_unchecked(op, shape, tensor.into_data(), requires_grad)
    }

    /// Differentiable leaf.
    pub fn leaf(&mut self, tensor: Tensor) -> NodeId {
        self.input(tensor.with_grad())
    }

    pub fn constant(&mut self, mut tensor: Tensor) -> NodeId {
        tensor.requires_grad = false;
        self.input(tensor)
    }

    /// Copies the value of `id` into a new constant node, cutting the
    /// gradient path.
    pub fn detach(&mut self, id: NodeId) -> Result<NodeId> {
        let node = self.node(id)?;
        let (shape, data) = (node.shape.clone(), node.data.clone());
        Ok(self.push_unchecked(Op::Constant, shape, data, false))
    }

    pub fn value(&self, id: NodeId) -> &[f64] {
        &self.nodes[id.0].data
    }

    pub fn shape(&self, id: NodeId) -> &[usize] {
        &self.nodes[id.0].shape
    }

    pub fn tensor(&self, id: NodeId) -> Tensor {
        let n = &self.nodes[id.0];
        Tensor::new(n.shape.clone(), n.data.clone()).expect("node invariant")
    }

    /// Value of a one-element node.
    pub fn scalar(&self, id: NodeId) -> Option<f64> {
        let d = self.value(id);
        (d.len() == 1).then(|| d[0])
    }

    fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.0).ok_or(Error::UnknownNode(id.0))
    }

    fn push_unchecked(&mut self, op: Op, shape: Vec<usize>, data: Vec<f64>, rg: bool) -> NodeId {
        debug_assert_eq!(numel(&shape), data.len());
        self.nodes.push(Node {
            op,
            shape,
            data,
            requires_grad: rg,
        });
        NodeId(self.nodes.len() - 1)
    }

    fn push(&mut self, op: Op, inputs: &[NodeId], shape: Vec<usize>, data: Vec<f64>) -> Result<NodeId> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                node: self.nodes.len(),
            });
        }
        let rg = inputs.iter().any(|i| self.nodes[i.0].requires_grad);
        Ok(self.push_unchecked(op, shape, data, rg))
    }

    /// Generic entry point dispatching on `kind`.
    pub fn apply(&mut self, kind: OpKind, inputs: &[NodeId]) -> Result<NodeId> {
        let arity = |n: usize| -> Result<()> {
            if inputs.len() == n {
                Ok(())
            } else {
                Err(Error::invalid(alloc::format!(
                    "operation takes {n} inputs, got {}",
                    inputs.len()
                )))
            }
        };
        match kind {
            OpKind::Concat { axis } => self.concat(inputs, axis),
            OpKind::MatMul | OpKind::MatMulTransB | OpKind::AddBroadcast | OpKind::Sub | OpKind::Mul => {
                arity(2)?;
                let (a, b) = (inputs[0], inputs[1]);
                match kind {
                    OpKind::MatMul => self.matmul(a, b),
                    OpKind::MatMulTransB => self.matmul_bt(a, b),
                    OpKind::AddBroadcast => self.add(a, b),
                    OpKind::Sub => self.sub(a, b),
                    _ => self.mul(a, b),
                }
            }
            unary => {
                arity(1)?;
                let a = inputs[0];
                match unary {
                    OpKind::Affine { scale, shift } => self.affine(a, scale, shift),
                    OpKind::Relu => self.relu(a),
                    OpKind::Sigmoid => self.sigmoid(a),
                    OpKind::Tanh => self.tanh(a),
                    OpKind::Reshape(shape) => self.reshape(a, &shape),
                    OpKind::Softmax => self.softmax(a),
                    OpKind::Mean => self.mean(a),
                    OpKind::Sum => self.sum(a),
                    OpKind::Abs => self.abs(a),
                    OpKind::Square => self.square(a),
                    OpKind::Log => self.log(a),
                    _ => unreachable!(),
                }
            }
        }
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.matmul_impl(a, b, false)
    }

    pub fn matmul_bt(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.matmul_impl(a, b, true)
    }

    fn matmul_impl(&mut self, a: NodeId, b: NodeId, trans_b: bool) -> Result<NodeId> {
        let (na, nb) = (self.node(a)?, self.node(b)?);
        let mismatch = || Error::ShapeMismatch {
            op: if trans_b { "matmul_bt" } else { "matmul" },
            left: na.shape.clone(),
            right: nb.shape.clone(),
        };
        if na.shape.len() != 2 || nb.shape.len() != 2 {
            return Err(mismatch());
        }
        let (m, k) = (na.shape[0], na.shape[1]);
        let (bk, n) = if trans_b {
            (nb.shape[1], nb.shape[0])
        } else {
            (nb.shape[0], nb.shape[1])
        };
        if k != bk {
            return Err(mismatch());
        }
        let bref = if trans_b {
            MatRef::transposed(&nb.data, n, k)
        } else {
            MatRef::row_major(&nb.data, k, n)
        };
        let mut out = vec![0.0; m * n];
        gemm(MatRef::row_major(&na.data, m, k), bref, &mut out, 0.0);
        self.push(Op::MatMul { a, b, trans_b }, &[a, b], vec![m, n], out)
    }

    /// `a + b` where `b`'s shape equals a trailing suffix of `a`'s shape.
    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (na, nb) = (self.node(a)?, self.node(b)?);
        if nb.shape.len() > na.shape.len() || !na.shape.ends_with(&nb.shape) {
            return Err(Error::ShapeMismatch {
                op: "add_broadcast",
                left: na.shape.clone(),
                right: nb.shape.clone(),
            });
        }
        let inner = nb.data.len();
        let mut out = na.data.clone();
        for chunk in out.chunks_exact_mut(inner) {
            chunk.iter_mut().zip(&nb.data).for_each(|(o, v)| *o += v);
        }
        let shape = na.shape.clone();
        self.push(Op::AddBroadcast(a, b), &[a, b], shape, out)
    }

    fn same_shape(&self, op: &'static str, a: NodeId, b: NodeId) -> Result<(&Node, &Node)> {
        let (na, nb) = (self.node(a)?, self.node(b)?);
        if na.shape != nb.shape {
            return Err(Error::ShapeMismatch {
                op,
                left: na.shape.clone(),
                right: nb.shape.clone(),
            });
        }
        Ok((na, nb))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (na, nb) = self.same_shape("sub", a, b)?;
        let out = na.data.iter().zip(&nb.data).map(|(x, y)| x - y).collect();
        let shape = na.shape.clone();
        self.push(Op::Sub(a, b), &[a, b], shape, out)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (na, nb) = self.same_shape("mul", a, b)?;
        let out = na.data.iter().zip(&nb.data).map(|(x, y)| x * y).collect();
        let shape = na.shape.clone();
        self.push(Op::Mul(a, b), &[a, b], shape, out)
    }

    fn unary(&mut self, a: NodeId, op: Op, f: impl Fn(f64) -> f64) -> Result<NodeId> {
        let na = self.node(a)?;
        let out = na.data.iter().map(|&x| f(x)).collect();
        let shape = na.shape.clone();
        self.push(op, &[a], shape, out)
    }

    pub fn affine(&mut self, a: NodeId, scale: f64, shift: f64) -> Result<NodeId> {
        self.unary(a, Op::Affine { a, scale }, |x| scale * x + shift)
    }

    pub fn relu(&mut self, a: NodeId) -> Result<NodeId> {
        self.unary(a, Op::Relu(a), |x| if x > 0.0 { x } else { 0.0 })
    }

    pub fn sigmoid(&mut self, a: NodeId) -> Result<NodeId> {
        self.unary(a, Op::Sigmoid(a), sigmoid)
    }

    pub fn tanh(&mut self, a: NodeId) -> Result<NodeId> {
        self.unary(a, Op::Tanh(a), libm::tanh)
    }

    pub fn abs(&mut self, a: NodeId) -> Result<NodeId> {
        self.unary(a, Op::Abs(a), libm::fabs)
    }

    pub fn square(&mut self, a: NodeId) -> Result<NodeId> {
        self.unary(a, Op::Square(a), |x| x * x)
    }

    pub fn log(&mut self, a: NodeId) -> Result<NodeId> {
        let na = self.node(a)?;
        let mut clamped = Vec::new();
        let out = na
            .data
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                if x < LOG_EPSILON {
                    clamped.push(i);
                    libm::log(LOG_EPSILON)
                } else {
                    libm::log(x)
                }
            })
            .collect();
        let shape = na.shape.clone();
        self.clamp_events += clamped.len();
        self.push(Op::Log { a, clamped }, &[a], shape, out)
    }

    pub fn reshape(&mut self, a: NodeId, shape: &[usize]) -> Result<NodeId> {
        let na = self.node(a)?;
        if numel(shape) != na.data.len() || shape.iter().any(|&d| d == 0) {
            return Err(Error::ShapeMismatch {
                op: "reshape",
                left: na.shape.clone(),
                right: shape.to_vec(),
            });
        }
        let data = na.data.clone();
        self.push(Op::Reshape(a), &[a], shape.to_vec(), data)
    }

    /// Collapses every axis after the first.
    pub fn flatten(&mut self, a: NodeId) -> Result<NodeId> {
        let shape = self.node(a)?.shape.clone();
        let rest: usize = shape[1..].iter().product();
        self.reshape(a, &[shape[0], rest])
    }

    pub fn concat(&mut self, inputs: &[NodeId], axis: usize) -> Result<NodeId> {
        let first = *inputs
            .first()
            .ok_or_else(|| Error::invalid("concat of zero tensors"))?;
        let base = self.node(first)?.shape.clone();
        if axis >= base.len() {
            return Err(Error::invalid(alloc::format!(
                "concat axis {axis} out of range for rank {}",
                base.len()
            )));
        }
        let mut total = 0;
        for &id in inputs {
            let s = &self.node(id)?.shape;
            let compatible = s.len() == base.len()
                && s.iter().zip(&base).enumerate().all(|(i, (x, y))| i == axis || x == y);
            if !compatible {
                return Err(Error::ShapeMismatch {
                    op: "concat",
                    left: base.clone(),
                    right: s.clone(),
                });
            }
            total += s[axis];
        }
        let outer: usize = base[..axis].iter().product();
        let inner: usize = base[axis + 1..].iter().product();
        let mut out = Vec::with_capacity(outer * total * inner);
        for o in 0..outer {
            for &id in inputs {
                let n = &self.nodes[id.0];
                let block = n.shape[axis] * inner;
                out.extend_from_slice(&n.data[o * block..(o + 1) * block]);
            }
        }
        let mut shape = base;
        shape[axis] = total;
        self.push(
            Op::Concat {
                inputs: inputs.to_vec(),
                axis,
            },
            inputs,
            shape,
            out,
        )
    }

    pub fn softmax(&mut self, a: NodeId) -> Result<NodeId> {
        let na = self.node(a)?;
        let width = *na.shape.last().expect("rank >= 1");
        let mut out = na.data.clone();
        for row in out.chunks_exact_mut(width) {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for v in row.iter_mut() {
                *v = libm::exp(*v - max);
                total += *v;
            }
            row.iter_mut().for_each(|v| *v /= total);
        }
        let shape = na.shape.clone();
        self.push(Op::Softmax(a), &[a], shape, out)
    }

    pub fn sum(&mut self, a: NodeId) -> Result<NodeId> {
        let total = self.node(a)?.data.iter().sum();
        self.push(Op::Sum(a), &[a], vec![1], vec![total])
    }

    pub fn mean(&mut self, a: NodeId) -> Result<NodeId> {
        let na = self.node(a)?;
        let mean = na.data.iter().sum::<f64>() / na.data.len() as f64;
        self.push(Op::Mean(a), &[a], vec![1], vec![mean])
    }

    /// Weighted sum of scalar nodes, `sum_i w_i * t_i`.
    pub fn weighted_sum(&mut self, terms: &[(f64, NodeId)]) -> Result<NodeId> {
        let mut acc: Option<NodeId> = None;
        for &(w, t) in terms {
            let scaled = if w == 1.0 { t } else { self.affine(t, w, 0.0)? };
            acc = Some(match acc {
                None => scaled,
                Some(prev) => self.add(prev, scaled)?,
            });
        }
        acc.ok_or_else(|| Error::invalid("weighted sum of zero terms"))
    }

    /// Reverse sweep from the scalar `loss`. Every differentiable leaf gets
    /// an entry, zero when it does not reach the loss.
    pub fn backward(&self, loss: NodeId) -> Result<Gradients> {
        let ln = self.node(loss)?;
        if ln.data.len() != 1 {
            return Err(Error::NonScalarLoss {
                shape: ln.shape.clone(),
            });
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(vec![1.0]);
        for idx in (0..=loss.0).rev() {
            let node = &self.nodes[idx];
            if !node.requires_grad {
                grads[idx] = None;
                continue;
            }
            let Some(g) = grads[idx].take() else { continue };
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { node: idx });
            }
            self.propagate(node, &g, &mut grads);
            grads[idx] = Some(g);
        }
        for (idx, node) in self.nodes.iter().enumerate() {
            if matches!(node.op, Op::Leaf) && grads[idx].is_none() {
                grads[idx] = Some(vec![0.0; node.data.len()]);
            }
        }
        Ok(Gradients { grads })
    }

    fn propagate(&self, node: &Node, g: &[f64], grads: &mut [Option<Vec<f64>>]) {
        let data = |id: NodeId| self.nodes[id.0].data.as_slice();
        match &node.op {
            Op::Leaf | Op::Constant => {}
            Op::MatMul { a, b, trans_b } => {
                let (sa, sb) = (&self.nodes[a.0].shape, &self.nodes[b.0].shape);
                let (m, k) = (sa[0], sa[1]);
                let n = node.shape[1];
                let gref = MatRef::row_major(g, m, n);
                if self.wants(*a) {
                    // dA = G B^T
                    let bt = if *trans_b {
                        MatRef::row_major(data(*b), n, k)
                    } else {
                        MatRef::transposed(data(*b), sb[0], sb[1])
                    };
                    accumulate_with(grads, *a, m * k, |buf, beta| gemm(gref, bt, buf, beta));
                }
                if self.wants(*b) {
                    let aref = MatRef::row_major(data(*a), m, k);
                    if *trans_b {
                        // dB = G^T A, shape [n,k]
                        let gt = MatRef::transposed(g, m, n);
                        accumulate_with(grads, *b, n * k, |buf, beta| gemm(gt, aref, buf, beta));
                    } else {
                        // dB = A^T G, shape [k,n]
                        let at = MatRef::transposed(data(*a), m, k);
                        accumulate_with(grads, *b, k * n, |buf, beta| gemm(at, gref, buf, beta));
                    }
                }
            }
            Op::AddBroadcast(a, b) => {
                self.accumulate(grads, *a, g.iter().copied());
                if self.wants(*b) {
                    let inner = self.nodes[b.0].data.len();
                    let mut acc = vec![0.0; inner];
                    for chunk in g.chunks_exact(inner) {
                        acc.iter_mut().zip(chunk).for_each(|(s, v)| *s += v);
                    }
                    self.accumulate(grads, *b, acc.into_iter());
                }
            }
            Op::Sub(a, b) => {
                self.accumulate(grads, *a, g.iter().copied());
                self.accumulate(grads, *b, g.iter().map(|v| -v));
            }
            Op::Mul(a, b) => {
                let (da, db) = (data(*a), data(*b));
                self.accumulate(grads, *a, g.iter().zip(db).map(|(g, y)| g * y));
                self.accumulate(grads, *b, g.iter().zip(da).map(|(g, x)| g * x));
            }
            Op::Affine { a, scale } => {
                self.accumulate(grads, *a, g.iter().map(|v| v * scale));
            }
            Op::Relu(a) => {
                let x = data(*a);
                self.accumulate(grads, *a, g.iter().zip(x).map(|(g, &x)| if x > 0.0 { *g } else { 0.0 }));
            }
            Op::Sigmoid(a) => {
                let y = &node.data;
                self.accumulate(grads, *a, g.iter().zip(y).map(|(g, y)| g * y * (1.0 - y)));
            }
            Op::Tanh(a) => {
                let y = &node.data;
                self.accumulate(grads, *a, g.iter().zip(y).map(|(g, y)| g * (1.0 - y * y)));
            }
            Op::Abs(a) => {
                let x = data(*a);
                self.accumulate(grads, *a, g.iter().zip(x).map(|(g, &x)| g * sign(x)));
            }
            Op::Square(a) => {
                let x = data(*a);
                self.accumulate(grads, *a, g.iter().zip(x).map(|(g, x)| 2.0 * g * x));
            }
            Op::Log { a, clamped } => {
                let x = data(*a);
                let mut d: Vec<f64> = g.iter().zip(x).map(|(g, x)| g / x.max(LOG_EPSILON)).collect();
                clamped.iter().for_each(|&i| d[i] = 0.0);
                self.accumulate(grads, *a, d.into_iter());
            }
            Op::Reshape(a) => self.accumulate(grads, *a, g.iter().copied()),
            Op::Concat { inputs, axis } => {
                let shape = &node.shape;
                let outer: usize = shape[..*axis].iter().product();
                let inner: usize = shape[axis + 1..].iter().product();
                let row = shape[*axis] * inner;
                let mut offset = 0;
                for id in inputs {
                    let block = self.nodes[id.0].shape[*axis] * inner;
                    if self.wants(*id) {
                        let mut part = Vec::with_capacity(outer * block);
                        for o in 0..outer {
                            let start = o * row + offset;
                            part.extend_from_slice(&g[start..start + block]);
                        }
                        self.accumulate(grads, *id, part.into_iter());
                    }
                    offset += block;
                }
            }
            Op::Softmax(a) => {
                let width = *node.shape.last().expect("rank >= 1");
                let mut d = vec![0.0; g.len()];
                for ((dr, gr), yr) in d
                    .chunks_exact_mut(width)
                    .zip(g.chunks_exact(width))
                    .zip(node.data.chunks_exact(width))
                {
                    let dot: f64 = gr.iter().zip(yr).map(|(g, y)| g * y).sum();
                    for ((o, g), y) in dr.iter_mut().zip(gr).zip(yr) {
                        *o = y * (g - dot);
                    }
                }
                self.accumulate(grads, *a, d.into_iter());
            }
            Op::Sum(a) => {
                let n = self.nodes[a.0].data.len();
                self.accumulate(grads, *a, core::iter::repeat(g[0]).take(n));
            }
            Op::Mean(a) => {
                let n = self.nodes[a.0].data.len();
                let v = g[0] / n as f64;
                self.accumulate(grads, *a, core::iter::repeat(v).take(n));
            }
        }
    }

    fn wants(&self, id: NodeId) -> bool {
        self.nodes[id.0].requires_grad
    }

    fn accumulate(&self, grads: &mut [Option<Vec<f64>>], id: NodeId, g: impl Iterator<Item = f64>) {
        if !self.wants(id) {
            return;
        }
        match &mut grads[id.0] {
            Some(buf) => buf.iter_mut().zip(g).for_each(|(s, v)| *s += v),
            slot @ None => *slot = Some(g.collect()),
        }
    }
}

fn accumulate_with(grads: &mut [Option<Vec<f64>>], id: NodeId, len: usize, f: impl FnOnce(&mut [f64], f64)) {
    match &mut grads[id.0] {
        Some(buf) => f(buf, 1.0),
        slot @ None => {
            let mut buf = vec![0.0; len];
            f(&mut buf, 0.0);
            *slot = Some(buf);
        }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}
