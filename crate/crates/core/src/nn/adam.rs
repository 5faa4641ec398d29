use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, Tensor};

#[derive(Debug, Clone, PartialEq)]
struct Slot {
    m: Vec<f64>,
    v: Vec<f64>,
    steps: u64,
}

/// Adam with bias correction. Slots are positional: the `i`-th parameter
/// passed to [`AdamState::step`] always owns moment slot `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    slots: Vec<Option<Slot>>,
}

impl AdamState {
    pub fn new(lr: f64) -> Self {
        AdamState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            slots: Vec::new(),
        }
    }

    /// Number of completed steps.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Applies one update in place. Parameters whose gradient is `None` did
    /// not take part in the loss; their values and moments are left alone.
    /// A non-finite gradient refuses the whole step.
    pub fn step(&mut self, params: &mut [&mut Tensor], grads: &[Option<&[f64]>]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::invalid("parameter and gradient counts differ"));
        }
        for (index, (p, g)) in params.iter().zip(grads).enumerate() {
            if let Some(g) = g {
                if g.len() != p.len() {
                    return Err(Error::BadLength {
                        shape: p.shape().to_vec(),
                        len: g.len(),
                    });
                }
                if g.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteGradient { index });
                }
            }
        }
        if self.slots.len() < params.len() {
            self.slots.resize(params.len(), None);
        }
        self.t += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        for ((p, g), slot) in params.iter_mut().zip(grads).zip(self.slots.iter_mut()) {
            let Some(g) = g else { continue };
            let s = slot.get_or_insert_with(|| Slot {
                m: vec![0.0; g.len()],
                v: vec![0.0; g.len()],
                steps: 0,
            });
            s.steps += 1;
            let c1 = 1.0 - libm::pow(b1, s.steps as f64);
            let c2 = 1.0 - libm::pow(b2, s.steps as f64);
            let (step, inv_c2) = (self.lr / c1, 1.0 / c2);
            for (((w, &gi), m), v) in p.data_mut().iter_mut().zip(g.iter()).zip(&mut s.m).zip(&mut s.v) {
                *m = b1 * *m + (1.0 - b1) * gi;
                *v = b2 * *v + (1.0 - b2) * gi * gi;
                *w -= step * *m / (libm::sqrt(*v * inv_c2) + self.eps);
            }
        }
        Ok(())
    }
}
