//! Fully connected layers, Xavier initialization and the Adam optimizer.

mod adam;

pub use adam::AdamState;

use alloc::vec::Vec;

use rand::Rng as _;

use crate::autodiff::{Graph, NodeId};
use crate::{rng, Error, Result, Tensor};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearLayer {
    /// `[out, in]`
    pub weight: Tensor,
    /// `[out]`
    pub bias: Tensor,
}

impl LinearLayer {
    pub fn in_dim(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn out_dim(&self) -> usize {
        self.weight.shape()[0]
    }
}

/// Xavier-uniform weights, zero biases, one layer per adjacent pair in
/// `dims`. Bit-identical for a given seed.
pub fn init_params(dims: &[usize], seed: u64) -> Result<Vec<LinearLayer>> {
    if dims.len() < 2 {
        return Err(Error::invalid("a network needs at least an input and an output size"));
    }
    if dims.contains(&0) {
        return Err(Error::invalid("zero-sized layer"));
    }
    let mut rng = rng::stream(seed, rng::streams::INIT);
    dims.windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
            let data = (0..fan_in * fan_out)
                .map(|_| rng.gen_range(-bound..=bound))
                .collect();
            Ok(LinearLayer {
                weight: Tensor::new(alloc::vec![fan_out, fan_in], data)?.with_grad(),
                bias: Tensor::zeros(&[fan_out]).with_grad(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputActivation {
    Identity,
    Sigmoid,
    /// Softmax over groups of `classes` consecutive outputs (channel-last
    /// pixels).
    SoftmaxPerPixel { classes: usize },
}

/// Multilayer perceptron with ReLU between layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<LinearLayer>,
    output: OutputActivation,
}

impl Mlp {
    pub fn new(dims: &[usize], output: OutputActivation, seed: u64) -> Result<Self> {
        if let OutputActivation::SoftmaxPerPixel { classes } = output {
            if classes == 0 || dims[dims.len() - 1] % classes != 0 {
                return Err(Error::invalid("softmax output size must be a multiple of the class count"));
            }
        }
        Ok(Mlp {
            layers: init_params(dims, seed)?,
            output,
        })
    }

    pub fn from_layers(layers: Vec<LinearLayer>, output: OutputActivation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("empty network"));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::ShapeMismatch {
                    op: "mlp",
                    left: pair[0].weight.shape().to_vec(),
                    right: pair[1].weight.shape().to_vec(),
                });
            }
        }
        for l in &layers {
            if l.bias.shape() != [l.out_dim()] {
                return Err(Error::ShapeMismatch {
                    op: "linear",
                    left: l.weight.shape().to_vec(),
                    right: l.bias.shape().to_vec(),
                });
            }
        }
        Ok(Mlp { layers, output })
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.layers.iter().map(LinearLayer::in_dim).collect();
        d.push(self.out_dim());
        d
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn output(&self) -> OutputActivation {
        self.output
    }

    pub fn layers(&self) -> &[LinearLayer] {
        &self.layers
    }

    /// Parameters in `w0, b0, w1, b1, ...` order.
    pub fn params(&self) -> impl Iterator<Item = &Tensor> + '_ {
        self.layers.iter().flat_map(|l| [&l.weight, &l.bias])
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut Tensor> + '_ {
        self.layers.iter_mut().flat_map(|l| [&mut l.weight, &mut l.bias])
    }

    pub fn param_count(&self) -> usize {
        self.params().map(Tensor::len).sum()
    }

    /// Registers the parameters on `g`. Frozen bindings are constants, so
    /// no gradient reaches them.
    pub fn bind(&self, g: &mut Graph, trainable: bool) -> BoundMlp {
        let nodes = self
            .layers
            .iter()
            .map(|l| {
                let (w, b) = (l.weight.clone(), l.bias.clone());
                if trainable {
                    (g.leaf(w), g.leaf(b))
                } else {
                    (g.constant(w), g.constant(b))
                }
            })
            .collect();
        BoundMlp {
            nodes,
            output: self.output,
        }
    }
}

/// An [`Mlp`] whose parameters live on a particular graph.
#[derive(Debug, Clone)]
pub struct BoundMlp {
    nodes: Vec<(NodeId, NodeId)>,
    output: OutputActivation,
}

impl BoundMlp {
    /// `x` is `[batch, in]`.
    pub fn forward(&self, g: &mut Graph, x: NodeId) -> Result<NodeId> {
        let mut h = x;
        for (i, &(w, b)) in self.nodes.iter().enumerate() {
            let z = g.matmul_bt(h, w)?;
            h = g.add(z, b)?;
            if i + 1 < self.nodes.len() {
                h = g.relu(h)?;
            }
        }
        match self.output {
            OutputActivation::Identity => Ok(h),
            OutputActivation::Sigmoid => g.sigmoid(h),
            OutputActivation::SoftmaxPerPixel { classes } => {
                let shape = g.shape(h).to_vec();
                let rows = shape[0] * shape[1] / classes;
                let grouped = g.reshape(h, &[rows, classes])?;
                let s = g.softmax(grouped)?;
                g.reshape(s, &shape)
            }
        }
    }

    /// Parameter nodes in the same order as [`Mlp::params`].
    pub fn param_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().flat_map(|&(w, b)| [w, b])
    }
}
