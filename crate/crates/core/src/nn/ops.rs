use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::Tensor;
use crate::math::{axpy, dot, exp};
use crate::{Error, Result};

/// `y = W x + b` for a row-major `W` of shape `rows × cols`.
pub fn affine_forward_into(w: &[f64], cols: usize, x: &[f64], b: &[f64], y: &mut [f64]) {
    for (r, yr) in y.iter_mut().enumerate() {
        *yr = b[r] + dot(&w[r * cols..(r + 1) * cols], x);
    }
}

/// Accumulates the gradients of `y = W x + b` given `dy`. Any output may be skipped.
pub fn affine_backward_into(
    w: &[f64],
    cols: usize,
    x: &[f64],
    dy: &[f64],
    dw: Option<&mut [f64]>,
    dx: Option<&mut [f64]>,
    db: Option<&mut [f64]>,
) {
    if let Some(dw) = dw {
        for (r, &g) in dy.iter().enumerate() {
            if g != 0.0 {
                axpy(g, x, &mut dw[r * cols..(r + 1) * cols]);
            }
        }
    }
    if let Some(dx) = dx {
        for (r, &g) in dy.iter().enumerate() {
            if g != 0.0 {
                axpy(g, &w[r * cols..(r + 1) * cols], dx);
            }
        }
    }
    if let Some(db) = db {
        db.iter_mut().zip(dy).for_each(|(d, g)| *d += g);
    }
}

fn check_affine(w: &Tensor, x: &Tensor, b: &Tensor) -> Result<()> {
    if w.shape().len() != 2 || x.shape().len() != 1 || w.shape()[1] != x.len() {
        return Err(Error::Shape {
            op: "affine",
            left: w.shape().to_vec(),
            right: x.shape().to_vec(),
        });
    }
    if b.shape() != [w.shape()[0]] {
        return Err(Error::Shape {
            op: "affine",
            left: w.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    Ok(())
}

/// `y = W x + b`.
pub fn affine(w: &Tensor, x: &Tensor, b: &Tensor) -> Result<Tensor> {
    check_affine(w, x, b)?;
    let mut y = vec![0.0; w.rows()];
    affine_forward_into(w.values(), w.cols(), x.values(), b.values(), &mut y);
    Ok(Tensor::vector(y))
}

/// Accumulates `dy`'s contribution into the `grad` buffers of `w`, `x` and `b`.
pub fn affine_backward(w: &mut Tensor, x: &mut Tensor, b: &mut Tensor, dy: &[f64]) -> Result<()> {
    check_affine(w, x, b)?;
    if dy.len() != w.rows() {
        return Err(Error::Shape {
            op: "affine_backward",
            left: w.shape().to_vec(),
            right: vec![dy.len()],
        });
    }
    let cols = w.cols();
    let (wv, wg) = w.parts_mut();
    let (xv, xg) = x.parts_mut();
    affine_backward_into(wv, cols, xv, dy, Some(wg), Some(xg), Some(b.grad_mut()));
    Ok(())
}

/// Shift-stabilised softmax.
pub fn softmax_slice(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = v.iter().map(|x| exp(x - max)).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= sum);
    out
}

pub fn softmax(v: &Tensor) -> Tensor {
    Tensor::vector(softmax_slice(v.values()))
}

/// Vector-Jacobian product of softmax: `dv = p ⊙ (dp − ⟨p, dp⟩)`.
pub fn softmax_backward(p: &[f64], dp: &[f64]) -> Vec<f64> {
    let s = dot(p, dp);
    p.iter().zip(dp).map(|(pi, di)| pi * (di - s)).collect()
}

/// Gradient of `−log softmax(logits)[action]` with respect to the logits,
/// given the probabilities: `p − onehot(action)`.
pub fn neg_log_prob_logit_grad(p: &[f64], action: usize) -> Vec<f64> {
    let mut g = p.to_vec();
    g[action] -= 1.0;
    g
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Row-wise max over the position axis of a `K × P` tensor. Returns the
/// maxima and the position of each; ties resolve to the lowest position.
pub fn max_pool_argmax(features: &Tensor) -> Result<(Tensor, Vec<usize>)> {
    let shape = features.shape();
    if shape.len() != 2 {
        return Err(Error::Shape {
            op: "max_pool_argmax",
            left: shape.to_vec(),
            right: vec![],
        });
    }
    let positions = shape[1];
    if positions == 0 {
        return Err(Error::EmptyInput("max pooling needs at least one position"));
    }
    let mut values = Vec::with_capacity(shape[0]);
    let mut idx = Vec::with_capacity(shape[0]);
    for row in features.values().chunks_exact(positions) {
        let i = crate::math::argmax(row);
        values.push(row[i]);
        idx.push(i);
    }
    Ok((Tensor::vector(values), idx))
}

/// Routes each row's upstream gradient to its stored argmax position.
pub fn max_pool_backward(indices: &[usize], dvalues: &[f64], positions: usize) -> Vec<f64> {
    let mut out = vec![0.0; indices.len() * positions];
    for (k, (&i, &g)) in indices.iter().zip(dvalues).enumerate() {
        out[k * positions + i] = g;
    }
    out
}

/// Inverted-dropout mask: each entry is `0` with probability `p`, else `1/(1−p)`.
pub fn dropout_mask<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<f64> {
    if p <= 0.0 {
        return vec![1.0; n];
    }
    let keep = 1.0 / (1.0 - p);
    (0..n)
        .map(|_| if rng.gen::<f64>() < p { 0.0 } else { keep })
        .collect()
}

pub fn apply_mask(v: &mut [f64], mask: &[f64]) {
    v.iter_mut().zip(mask).for_each(|(x, m)| *x *= m);
}
