use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::model::LossWeights;
use crate::{Error, Result};

/// Four switches over the optional loss terms, written `"abcd"` with
/// `a` = reconstruction of X, `b` = reconstruction of Y, `c` = latent
/// distance and `d` = confusion (which also gates classifier updates).
/// Supervised translation is always on, so `0000` is the basic baseline and
/// `1100` the reconstruction-regularized one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AblationId {
    pub recon_x: bool,
    pub recon_y: bool,
    pub distance: bool,
    pub confusion: bool,
}

impl AblationId {
    pub const DEFAULT_SET: [&'static str; 5] = ["0000", "1000", "1100", "1110", "1111"];

    /// Unit weights for every switched-on term.
    pub fn weights(self) -> LossWeights {
        self.apply(&LossWeights::lsm())
    }

    /// `base` with the weights of switched-off terms forced to zero.
    pub fn apply(self, base: &LossWeights) -> LossWeights {
        let keep = |on: bool, w: f64| if on { w } else { 0.0 };
        LossWeights {
            recon_x: keep(self.recon_x, base.recon_x),
            recon_y: keep(self.recon_y, base.recon_y),
            sup_xy: base.sup_xy,
            sup_yx: base.sup_yx,
            distance: keep(self.distance, base.distance),
            confusion: keep(self.confusion, base.confusion),
        }
    }

    pub fn to_code(self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Display for AblationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in [self.recon_x, self.recon_y, self.distance, self.confusion] {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for AblationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::invalid(alloc::format!("ablation id {s:?} must be four binary digits"))),
            })
            .collect::<Result<_>>()?;
        match bits.as_slice() {
            &[recon_x, recon_y, distance, confusion] => Ok(AblationId {
                recon_x,
                recon_y,
                distance,
                confusion,
            }),
            _ => Err(Error::invalid(alloc::format!("ablation id {s:?} must be four binary digits"))),
        }
    }
}
