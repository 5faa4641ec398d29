use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error("tensor of shape {shape:?} cannot hold {len} values")]
    BadLength { shape: Vec<usize>, len: usize },
    #[error("non-finite value produced at node {node}")]
    NonFinite { node: usize },
    #[error("backward requires a scalar loss, got shape {shape:?}")]
    NonScalarLoss { shape: Vec<usize> },
    #[error("unknown node id {0}")]
    UnknownNode(usize),
    #[error("function is not deterministic: two evaluations at the same point disagree")]
    NonDeterministic,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite gradient for parameter {index}; optimizer step refused")]
    NonFiniteGradient { index: usize },
    #[error("batch of kind {found} cannot be used here, expected {expected}")]
    WrongBatchKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("empty batch: {0}")]
    EmptyBatch(&'static str),
    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),
    #[error("training diverged at epoch {epoch}, step {step}: {detail}")]
    Diverged {
        epoch: usize,
        step: usize,
        detail: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
