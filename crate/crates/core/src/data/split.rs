use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{DatasetInfo, PairedDataset, Rows};
use crate::model::DomainSpec;
use crate::rng::{self, streams};
use crate::{Error, Result};

/// Sizes produced by [`split_semi_supervised`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitCounts {
    pub total: usize,
    pub train: usize,
    pub val: usize,
    pub test: usize,
    pub h1: usize,
    pub h2: usize,
    pub paired: usize,
    pub x_only: usize,
    pub y_only: usize,
}

/// 70/10/20 train/val/test (floors, test takes the rest); train halves
/// `H1 = floor(train / 2)` and `H2`; `floor(N * |H1| / 100)` pairs from H1,
/// the rest of H1 as x views and as many H2 items as y views.
pub fn split_counts(total: usize, n_percent: u32) -> Result<SplitCounts> {
    if n_percent > 100 {
        return Err(Error::invalid(alloc::format!("supervision level {n_percent}% outside [0, 100]")));
    }
    let train = total * 70 / 100;
    let val = total * 10 / 100;
    let h1 = train / 2;
    let paired = n_percent as usize * h1 / 100;
    Ok(SplitCounts {
        total,
        train,
        val,
        test: total - train - val,
        h1,
        h2: train - h1,
        paired,
        x_only: h1 - paired,
        y_only: h1 - paired,
    })
}

/// Aligned pairs with the dataset index each came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBank {
    pub x: Rows,
    pub y: Rows,
    pub origins: Vec<usize>,
}

impl PairBank {
    pub fn new(x: Rows, y: Rows, origins: Vec<usize>) -> Result<Self> {
        if x.len() != y.len() || x.len() != origins.len() {
            return Err(Error::invalid("pair bank views and origins differ in length"));
        }
        Ok(PairBank { x, y, origins })
    }

    fn take(ds: &PairedDataset, idx: &[usize]) -> Self {
        PairBank {
            x: ds.x.select(idx),
            y: ds.y.select(idx),
            origins: idx.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }
}

/// Single-domain views with their dataset indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewBank {
    pub rows: Rows,
    pub origins: Vec<usize>,
}

impl ViewBank {
    pub fn new(rows: Rows, origins: Vec<usize>) -> Result<Self> {
        if rows.len() != origins.len() {
            return Err(Error::invalid("view bank rows and origins differ in length"));
        }
        Ok(ViewBank { rows, origins })
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub x_spec: DomainSpec,
    pub y_spec: DomainSpec,
    pub info: DatasetInfo,
    pub n_percent: u32,
    pub split_seed: u64,
    /// Size of the dataset the banks were cut from.
    pub source_len: usize,
    pub paired: PairBank,
    pub x_only: ViewBank,
    pub y_only: ViewBank,
    pub val: PairBank,
    pub test: PairBank,
}

impl DatasetBundle {
    /// Checks widths and that no two banks share an underlying sample.
    pub fn validate(&self) -> Result<()> {
        let (dx, dy) = (self.x_spec.dim(), self.y_spec.dim());
        let widths = [
            (self.paired.x.dim(), dx),
            (self.paired.y.dim(), dy),
            (self.x_only.rows.dim(), dx),
            (self.y_only.rows.dim(), dy),
            (self.val.x.dim(), dx),
            (self.val.y.dim(), dy),
            (self.test.x.dim(), dx),
            (self.test.y.dim(), dy),
        ];
        if widths.iter().any(|(a, b)| a != b) {
            return Err(Error::invalid("bank width differs from its domain dimension"));
        }
        let mut seen: Vec<usize> = [
            &self.paired.origins,
            &self.x_only.origins,
            &self.y_only.origins,
            &self.val.origins,
            &self.test.origins,
        ]
        .iter()
        .flat_map(|o| o.iter().copied())
        .collect();
        let n = seen.len();
        if seen.iter().any(|&o| o >= self.source_len) {
            return Err(Error::invalid("bank origin outside the source dataset"));
        }
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != n {
            return Err(Error::invalid("banks share an underlying sample"));
        }
        Ok(())
    }

    pub fn has_training_data(&self) -> bool {
        !(self.paired.is_empty() && self.x_only.is_empty() && self.y_only.is_empty())
    }
}

/// Shuffles with the split stream of `seed`, then cuts per [`split_counts`].
pub fn split_semi_supervised(ds: &PairedDataset, n_percent: u32, seed: u64) -> Result<DatasetBundle> {
    let c = split_counts(ds.len(), n_percent)?;
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.shuffle(&mut rng::stream(seed, streams::SPLIT));
    let (train, rest) = order.split_at(c.train);
    let (val, test) = rest.split_at(c.val);
    let (h1, h2) = train.split_at(c.h1);
    let (paired, x_only) = h1.split_at(c.paired);
    let y_only = &h2[..c.y_only];
    let bundle = DatasetBundle {
        x_spec: ds.x_spec.clone(),
        y_spec: ds.y_spec.clone(),
        info: ds.info.clone(),
        n_percent,
        split_seed: seed,
        source_len: ds.len(),
        paired: PairBank::take(ds, paired),
        x_only: ViewBank {
            rows: ds.x.select(x_only),
            origins: x_only.to_vec(),
        },
        y_only: ViewBank {
            rows: ds.y.select(y_only),
            origins: y_only.to_vec(),
        },
        val: PairBank::take(ds, val),
        test: PairBank::take(ds, test),
    };
    bundle.validate()?;
    Ok(bundle)
}
