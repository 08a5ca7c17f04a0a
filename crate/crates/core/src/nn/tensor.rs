use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Half-width of the uniform range every freshly created parameter is drawn from.
pub const INIT_RANGE: f64 = 0.01;

/// Dense row-major array with a gradient buffer of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    values: Vec<f64>,
    grad: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            values: vec![0.0; n],
            grad: vec![0.0; n],
        }
    }

    pub fn from_vec(shape: &[usize], values: Vec<f64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if shape.is_empty() || shape.contains(&0) || n != values.len() {
            return Err(Error::Shape {
                op: "tensor",
                left: shape.to_vec(),
                right: vec![values.len()],
            });
        }
        Ok(Self {
            shape: shape.to_vec(),
            grad: vec![0.0; n],
            values,
        })
    }

    /// One-dimensional tensor. Panics on an empty vector.
    pub fn vector(values: Vec<f64>) -> Self {
        let n = values.len();
        Self::from_vec(&[n], values).expect("vector must be non-empty")
    }

    pub fn matrix(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Self::from_vec(&[rows, cols], values)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn grad_mut(&mut self) -> &mut [f64] {
        &mut self.grad
    }

    /// Mutable access to values and gradient together.
    pub fn parts_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.values, &mut self.grad)
    }

    pub fn zero_grad(&mut self) {
        self.grad.iter_mut().for_each(|g| *g = 0.0);
    }

    /// Row count of a matrix (first dimension).
    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    /// Elements per row (product of the trailing dimensions).
    pub fn cols(&self) -> usize {
        self.shape[1..].iter().product()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let c = self.cols();
        &self.values[r * c..(r + 1) * c]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        let c = self.cols();
        &mut self.values[r * c..(r + 1) * c]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().chain(&self.grad).all(|v| v.is_finite())
    }
}

/// Named parameters, iterated in name order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamStore {
    params: BTreeMap<String, Tensor>,
    rng_seed: u64,
}

impl ParamStore {
    pub fn new(rng_seed: u64) -> Self {
        Self {
            params: BTreeMap::new(),
            rng_seed,
        }
    }

    /// Creates every parameter in `specs` with values drawn from
    /// uniform[-INIT_RANGE, INIT_RANGE], visiting names in sorted order so the
    /// draw is reproducible for a seed.
    pub fn initialized<I, S>(rng_seed: u64, specs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<usize>)>,
        S: Into<String>,
    {
        let mut shapes = BTreeMap::new();
        for (name, shape) in specs {
            let name = name.into();
            if shapes.insert(name.clone(), shape).is_some() {
                return Err(Error::Invalid(alloc::format!("duplicate parameter `{name}`")));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut store = Self::new(rng_seed);
        for (name, shape) in shapes {
            let n: usize = shape.iter().product();
            let values = (0..n).map(|_| rng.gen_range(-INIT_RANGE..=INIT_RANGE)).collect();
            store.params.insert(name, Tensor::from_vec(&shape, values)?);
        }
        Ok(store)
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// Inserts or replaces a parameter.
    pub fn insert(&mut self, name: impl Into<String>, tensor: Tensor) {
        self.params.insert(name.into(), tensor);
    }

    pub fn get(&self, name: &str) -> Result<&Tensor> {
        self.params
            .get(name)
            .ok_or_else(|| Error::UnknownParam(name.to_string()))
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Tensor> {
        self.params
            .get_mut(name)
            .ok_or_else(|| Error::UnknownParam(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.params.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.params.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Tensor)> {
        self.params.iter_mut().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar values across all parameters.
    pub fn num_values(&self) -> usize {
        self.params.values().map(Tensor::len).sum()
    }

    pub fn zero_grads(&mut self) {
        self.params.values_mut().for_each(Tensor::zero_grad);
    }

    /// Rounds every value to the nearest 32-bit float, the checkpoint precision.
    pub fn round_to_f32(&mut self) {
        for t in self.params.values_mut() {
            for v in t.values_mut() {
                *v = *v as f32 as f64;
            }
        }
    }
}

/// Gradient buffer for one parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum GradBuf {
    Dense(Vec<f64>),
    /// Row-sparse gradient of a matrix; absent rows are zero.
    Rows {
        width: usize,
        rows: BTreeMap<usize, Vec<f64>>,
    },
}

impl GradBuf {
    fn add_assign(&mut self, other: &GradBuf) {
        match (self, other) {
            (GradBuf::Dense(a), GradBuf::Dense(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            (GradBuf::Rows { rows: a, width }, GradBuf::Rows { rows: b, .. }) => {
                for (r, g) in b {
                    let dst = a.entry(*r).or_insert_with(|| vec![0.0; *width]);
                    dst.iter_mut().zip(g).for_each(|(x, y)| *x += y);
                }
            }
            (GradBuf::Dense(a), GradBuf::Rows { rows, width }) => {
                for (r, g) in rows {
                    let dst = &mut a[r * width..(r + 1) * width];
                    dst.iter_mut().zip(g).for_each(|(x, y)| *x += y);
                }
            }
            (this @ GradBuf::Rows { .. }, GradBuf::Dense(b)) => {
                let mut dense = b.clone();
                if let GradBuf::Rows { rows, width } = &*this {
                    for (r, g) in rows {
                        dense[r * width..(r + 1) * width]
                            .iter_mut()
                            .zip(g)
                            .for_each(|(x, y)| *x += y);
                    }
                }
                *this = GradBuf::Dense(dense);
            }
        }
    }

    /// Gradient value at flat index `i`.
    pub fn at(&self, i: usize) -> f64 {
        match self {
            GradBuf::Dense(v) => v[i],
            GradBuf::Rows { width, rows } => rows.get(&(i / width)).map_or(0.0, |r| r[i % width]),
        }
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let (dense, rows) = match self {
            GradBuf::Dense(v) => (Some(v.iter().copied()), None),
            GradBuf::Rows { rows, .. } => (None, Some(rows.values().flat_map(|r| r.iter().copied()))),
        };
        dense.into_iter().flatten().chain(rows.into_iter().flatten())
    }

    fn scale(&mut self, f: f64) {
        match self {
            GradBuf::Dense(v) => v.iter_mut().for_each(|x| *x *= f),
            GradBuf::Rows { rows, .. } => rows
                .values_mut()
                .for_each(|r| r.iter_mut().for_each(|x| *x *= f)),
        }
    }
}

/// Gradients keyed like a [`ParamStore`]. Missing entries are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradStore {
    bufs: BTreeMap<String, GradBuf>,
}

impl GradStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Copies the `grad` buffers of every tensor in `params`.
    pub fn from_tensor_grads(params: &ParamStore) -> Self {
        let bufs = params
            .iter()
            .map(|(k, t)| (k.to_string(), GradBuf::Dense(t.grad().to_vec())))
            .collect();
        Self { bufs }
    }

    /// Dense gradient slice for `name`, allocated as zeros of length `len` on first use.
    pub fn dense_mut(&mut self, name: &str, len: usize) -> &mut [f64] {
        if !self.bufs.contains_key(name) {
            self.bufs.insert(name.to_string(), GradBuf::Dense(vec![0.0; len]));
        }
        match self.bufs.get_mut(name) {
            Some(GradBuf::Dense(v)) => v,
            _ => panic!("gradient `{name}` is row-sparse"),
        }
    }

    /// One row of a row-sparse gradient.
    pub fn row_mut(&mut self, name: &str, row: usize, width: usize) -> &mut [f64] {
        if !self.bufs.contains_key(name) {
            self.bufs.insert(
                name.to_string(),
                GradBuf::Rows {
                    width,
                    rows: BTreeMap::new(),
                },
            );
        }
        match self.bufs.get_mut(name) {
            Some(GradBuf::Rows { rows, .. }) => rows.entry(row).or_insert_with(|| vec![0.0; width]),
            Some(GradBuf::Dense(v)) => &mut v[row * width..(row + 1) * width],
            None => unreachable!(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&GradBuf> {
        self.bufs.get(name)
    }

    /// Gradient at a flat index of `name`; zero when absent.
    pub fn at(&self, name: &str, i: usize) -> f64 {
        self.bufs.get(name).map_or(0.0, |b| b.at(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &GradBuf)> {
        self.bufs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.bufs.is_empty()
    }

    /// Adds `other` into `self`.
    pub fn merge(&mut self, other: &GradStore) {
        for (name, buf) in &other.bufs {
            match self.bufs.get_mut(name) {
                Some(dst) => dst.add_assign(buf),
                None => {
                    self.bufs.insert(name.clone(), buf.clone());
                }
            }
        }
    }

    pub fn scale(&mut self, f: f64) {
        self.bufs.values_mut().for_each(|b| b.scale(f));
    }

    /// Name of the first parameter holding a NaN or infinite gradient.
    pub fn first_non_finite(&self) -> Option<&str> {
        self.bufs
            .iter()
            .find(|(_, b)| b.values().any(|v| !v.is_finite()))
            .map(|(k, _)| k.as_str())
    }

    /// Largest absolute gradient entry.
    pub fn max_abs(&self) -> f64 {
        self.bufs
            .values()
            .flat_map(|b| b.values())
            .fold(0.0, |m, v| if v.abs() > m { v.abs() } else { m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_reproducible_and_in_range() {
        let specs = || [("b", vec![3]), ("a", vec![2, 4])];
        let a = ParamStore::initialized(7, specs()).unwrap();
        let b = ParamStore::initialized(7, specs()).unwrap();
        assert_eq!(a, b);
        for (_, t) in a.iter() {
            assert_eq!(t.values().len(), t.grad().len());
            assert!(t.values().iter().all(|v| v.abs() <= INIT_RANGE));
        }
        let c = ParamStore::initialized(8, specs()).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.names().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(ParamStore::initialized(0, [("x", vec![1]), ("x", vec![2])]).is_err());
    }

    #[test]
    fn rows_merge_into_dense() {
        let mut a = GradStore::new();
        a.dense_mut("e", 6)[0] = 1.0;
        let mut b = GradStore::new();
        b.row_mut("e", 2, 2)[1] = 3.0;
        a.merge(&b);
        assert_eq!(a.at("e", 0), 1.0);
        assert_eq!(a.at("e", 5), 3.0);

        let mut c = GradStore::new();
        c.row_mut("e", 1, 2)[0] = 2.0;
        c.merge(&b);
        assert_eq!(c.at("e", 2), 2.0);
        assert_eq!(c.at("e", 5), 3.0);
        assert_eq!(c.at("e", 0), 0.0);
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(Tensor::from_vec(&[2, 2], vec![1.0; 3]).is_err());
        assert!(Tensor::from_vec(&[0], vec![]).is_err());
    }
}
