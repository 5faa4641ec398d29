use crate::{Error, Result, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchKind {
    PairedXY,
    OnlyX,
    OnlyY,
}

impl BatchKind {
    pub fn name(self) -> &'static str {
        match self {
            BatchKind::PairedXY => "paired",
            BatchKind::OnlyX => "x-only",
            BatchKind::OnlyY => "y-only",
        }
    }
}

/// Views are `[batch, dim]` with items flattened.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    kind: BatchKind,
    x: Option<Tensor>,
    y: Option<Tensor>,
}

fn rows(t: &Tensor) -> Result<usize> {
    match t.shape() {
        [b, _] => Ok(*b),
        other => Err(Error::invalid(alloc::format!("batch views must be [batch, dim], got {other:?}"))),
    }
}

impl Batch {
    pub fn paired(x: Tensor, y: Tensor) -> Result<Self> {
        if rows(&x)? != rows(&y)? {
            return Err(Error::ShapeMismatch {
                op: "paired batch",
                left: x.shape().to_vec(),
                right: y.shape().to_vec(),
            });
        }
        Ok(Batch {
            kind: BatchKind::PairedXY,
            x: Some(x),
            y: Some(y),
        })
    }

    pub fn only_x(x: Tensor) -> Result<Self> {
        rows(&x)?;
        Ok(Batch {
            kind: BatchKind::OnlyX,
            x: Some(x),
            y: None,
        })
    }

    pub fn only_y(y: Tensor) -> Result<Self> {
        rows(&y)?;
        Ok(Batch {
            kind: BatchKind::OnlyY,
            x: None,
            y: Some(y),
        })
    }

    pub fn kind(&self) -> BatchKind {
        self.kind
    }

    pub fn x(&self) -> Option<&Tensor> {
        self.x.as_ref()
    }

    pub fn y(&self) -> Option<&Tensor> {
        self.y.as_ref()
    }

    pub fn len(&self) -> usize {
        self.x.as_ref().or(self.y.as_ref()).map_or(0, |t| t.shape()[0])
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
