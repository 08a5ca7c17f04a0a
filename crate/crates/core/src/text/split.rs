use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitScheme {
    Holdout { dev_fraction: f64 },
    KFold { k: usize },
}

/// Sample indices assigned to each part of a split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetSplit {
    Holdout { train: Vec<usize>, dev: Vec<usize> },
    KFold { folds: Vec<Vec<usize>> },
}

impl DatasetSplit {
    /// Train and held-out indices of fold `i` (for holdout, `i` is ignored).
    pub fn fold(&self, i: usize) -> (Vec<usize>, Vec<usize>) {
        match self {
            DatasetSplit::Holdout { train, dev } => (train.clone(), dev.clone()),
            DatasetSplit::KFold { folds } => {
                let train = folds
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .flat_map(|(_, f)| f.iter().copied())
                    .collect();
                (train, folds[i].clone())
            }
        }
    }
}

/// Shuffles `0..n` with `seed` and partitions it per `scheme`. K-fold sizes
/// differ by at most one, larger folds first.
pub fn split_dataset(n: usize, scheme: SplitScheme, seed: u64) -> Result<DatasetSplit> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    match scheme {
        SplitScheme::Holdout { dev_fraction } => {
            if !(0.0..=1.0).contains(&dev_fraction) {
                return Err(Error::InvalidConfig(alloc::format!("dev fraction {dev_fraction}")));
            }
            let n_dev = libm::round(n as f64 * dev_fraction) as usize;
            let dev = idx.split_off(n - n_dev);
            Ok(DatasetSplit::Holdout { train: idx, dev })
        }
        SplitScheme::KFold { k } => {
            if k == 0 || k > n {
                return Err(Error::TooManyFolds { k, n });
            }
            let (base, extra) = (n / k, n % k);
            let mut folds = Vec::with_capacity(k);
            let mut it = idx.into_iter();
            for f in 0..k {
                let size = base + usize::from(f < extra);
                folds.push(it.by_ref().take(size).collect());
            }
            Ok(DatasetSplit::KFold { folds })
        }
    }
}
