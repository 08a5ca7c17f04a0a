use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{Vocabulary, PAD};
use crate::nn::{Tensor, INIT_RANGE};
use crate::{Error, Result};

/// `|V| × d` embedding matrix with a per-row pretrained flag.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub values: Vec<f64>,
    pub pretrained: Vec<bool>,
}

impl EmbeddingTable {
    /// Rows found in `vectors` are copied and flagged pretrained; the rest are
    /// drawn from uniform[-0.01, 0.01]. The PAD row is zero.
    pub fn assemble<'a, I, R>(vocab: &Vocabulary, dim: usize, vectors: I, rng: &mut R) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a [f64])>,
        R: Rng + ?Sized,
    {
        let n = vocab.len();
        let mut values: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-INIT_RANGE..=INIT_RANGE)).collect();
        let mut pretrained = vec![false; n];
        for (token, vec) in vectors {
            if vec.len() != dim {
                return Err(Error::Shape {
                    op: "embedding",
                    left: vec![dim],
                    right: vec![vec.len()],
                });
            }
            if !vocab.contains(token) {
                continue;
            }
            let id = vocab.id(token);
            if id == PAD {
                continue;
            }
            values[id * dim..(id + 1) * dim].copy_from_slice(vec);
            pretrained[id] = true;
        }
        values[PAD * dim..(PAD + 1) * dim].iter_mut().for_each(|v| *v = 0.0);
        Ok(Self { dim, values, pretrained })
    }

    pub fn rows(&self) -> usize {
        self.pretrained.len()
    }

    pub fn row(&self, id: usize) -> &[f64] {
        &self.values[id * self.dim..(id + 1) * self.dim]
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::matrix(self.rows(), self.dim, self.values.clone()).expect("embedding table is non-empty")
    }
}
