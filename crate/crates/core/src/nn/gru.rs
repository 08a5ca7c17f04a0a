//! Gated recurrent unit with an exact backward pass.
//!
//! ```text
//! z  = σ(W_z x + U_z h + b_z)
//! r  = σ(W_r x + U_r h + b_r)
//! h̃  = tanh(W_h x + U_h (r ⊙ h) + b_h)
//! h' = (1 − z) ⊙ h + z ⊙ h̃
//! ```

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::ops::{affine_backward_into, affine_forward_into};
use super::{GradStore, ParamStore};
use crate::math::{sigmoid, tanh};
use crate::{Error, Result};

/// Parameter name suffixes, appended to a prefix such as `"gru."`.
pub const GRU_PARAM_SUFFIXES: [&str; 9] = ["w_z", "u_z", "b_z", "w_r", "u_r", "b_r", "w_h", "u_h", "b_h"];

/// Borrowed GRU weights.
#[derive(Debug, Clone, Copy)]
pub struct GruView<'a> {
    pub hidden: usize,
    pub input: usize,
    pub w_z: &'a [f64],
    pub u_z: &'a [f64],
    pub b_z: &'a [f64],
    pub w_r: &'a [f64],
    pub u_r: &'a [f64],
    pub b_r: &'a [f64],
    pub w_h: &'a [f64],
    pub u_h: &'a [f64],
    pub b_h: &'a [f64],
}

impl<'a> GruView<'a> {
    pub fn from_store(store: &'a ParamStore, prefix: &str) -> Result<Self> {
        let get = |s: &str| store.get(&format!("{prefix}{s}"));
        let w_z = get("w_z")?;
        let u_z = get("u_z")?;
        let (hidden, input) = (w_z.rows(), w_z.cols());
        let view = Self {
            hidden,
            input,
            w_z: w_z.values(),
            u_z: u_z.values(),
            b_z: get("b_z")?.values(),
            w_r: get("w_r")?.values(),
            u_r: get("u_r")?.values(),
            b_r: get("b_r")?.values(),
            w_h: get("w_h")?.values(),
            u_h: get("u_h")?.values(),
            b_h: get("b_h")?.values(),
        };
        let ok = [view.w_z, view.w_r, view.w_h].iter().all(|w| w.len() == hidden * input)
            && [view.u_z, view.u_r, view.u_h].iter().all(|u| u.len() == hidden * hidden)
            && [view.b_z, view.b_r, view.b_h].iter().all(|b| b.len() == hidden);
        if !ok {
            return Err(Error::Shape {
                op: "gru",
                left: vec![hidden, input],
                right: vec![u_z.len()],
            });
        }
        Ok(view)
    }

    /// Shapes of the nine parameters, in [`GRU_PARAM_SUFFIXES`] order.
    pub fn param_shapes(hidden: usize, input: usize) -> [Vec<usize>; 9] {
        let w = vec![hidden, input];
        let u = vec![hidden, hidden];
        let b = vec![hidden];
        [w.clone(), u.clone(), b.clone(), w.clone(), u.clone(), b.clone(), w, u, b]
    }
}

/// Forward activations kept for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct GruCache {
    pub h_prev: Vec<f64>,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub cand: Vec<f64>,
    pub r_h: Vec<f64>,
}

pub fn gru_step(h_prev: &[f64], x: &[f64], gru: &GruView<'_>) -> Result<(Vec<f64>, GruCache)> {
    let (hn, xn) = (gru.hidden, gru.input);
    if h_prev.len() != hn || x.len() != xn {
        return Err(Error::Shape {
            op: "gru_step",
            left: vec![hn, xn],
            right: vec![h_prev.len(), x.len()],
        });
    }
    let mut z = vec![0.0; hn];
    let mut r = vec![0.0; hn];
    let mut cand = vec![0.0; hn];
    let mut tmp = vec![0.0; hn];

    affine_forward_into(gru.w_z, xn, x, gru.b_z, &mut z);
    affine_forward_into(gru.u_z, hn, h_prev, &vec![0.0; hn], &mut tmp);
    z.iter_mut().zip(&tmp).for_each(|(a, b)| *a = sigmoid(*a + b));

    affine_forward_into(gru.w_r, xn, x, gru.b_r, &mut r);
    affine_forward_into(gru.u_r, hn, h_prev, &vec![0.0; hn], &mut tmp);
    r.iter_mut().zip(&tmp).for_each(|(a, b)| *a = sigmoid(*a + b));

    let r_h: Vec<f64> = r.iter().zip(h_prev).map(|(a, b)| a * b).collect();
    affine_forward_into(gru.w_h, xn, x, gru.b_h, &mut cand);
    affine_forward_into(gru.u_h, hn, &r_h, &vec![0.0; hn], &mut tmp);
    cand.iter_mut().zip(&tmp).for_each(|(a, b)| *a = tanh(*a + b));

    let h: Vec<f64> = (0..hn)
        .map(|i| (1.0 - z[i]) * h_prev[i] + z[i] * cand[i])
        .collect();
    Ok((
        h,
        GruCache {
            h_prev: h_prev.to_vec(),
            z,
            r,
            cand,
            r_h,
        },
    ))
}

/// Result of backpropagating one GRU step.
#[derive(Debug, Clone, PartialEq)]
pub struct GruBackward {
    /// Gradients of the three gate pre-activations (z, r, candidate).
    pub d_pre_z: Vec<f64>,
    pub d_pre_r: Vec<f64>,
    pub d_pre_h: Vec<f64>,
    pub dh_prev: Vec<f64>,
    pub dx: Vec<f64>,
}

pub fn gru_step_backward(gru: &GruView<'_>, cache: &GruCache, dh: &[f64]) -> GruBackward {
    let (hn, xn) = (gru.hidden, gru.input);
    let GruCache {
        h_prev,
        z,
        r,
        cand,
        r_h: _,
    } = cache;

    let mut dh_prev: Vec<f64> = (0..hn).map(|i| dh[i] * (1.0 - z[i])).collect();
    let d_pre_z: Vec<f64> = (0..hn)
        .map(|i| dh[i] * (cand[i] - h_prev[i]) * z[i] * (1.0 - z[i]))
        .collect();
    let d_pre_h: Vec<f64> = (0..hn)
        .map(|i| dh[i] * z[i] * (1.0 - cand[i] * cand[i]))
        .collect();

    let mut d_rh = vec![0.0; hn];
    affine_backward_into(gru.u_h, hn, &[], &d_pre_h, None, Some(&mut d_rh), None);
    let d_pre_r: Vec<f64> = (0..hn)
        .map(|i| d_rh[i] * h_prev[i] * r[i] * (1.0 - r[i]))
        .collect();
    for i in 0..hn {
        dh_prev[i] += d_rh[i] * r[i];
    }
    affine_backward_into(gru.u_z, hn, &[], &d_pre_z, None, Some(&mut dh_prev), None);
    affine_backward_into(gru.u_r, hn, &[], &d_pre_r, None, Some(&mut dh_prev), None);

    let mut dx = vec![0.0; xn];
    affine_backward_into(gru.w_z, xn, &[], &d_pre_z, None, Some(&mut dx), None);
    affine_backward_into(gru.w_r, xn, &[], &d_pre_r, None, Some(&mut dx), None);
    affine_backward_into(gru.w_h, xn, &[], &d_pre_h, None, Some(&mut dx), None);

    GruBackward {
        d_pre_z,
        d_pre_r,
        d_pre_h,
        dh_prev,
        dx,
    }
}

impl GruBackward {
    /// Adds this step's parameter gradients into `grads` under `prefix`.
    pub fn accumulate(&self, gru: &GruView<'_>, cache: &GruCache, x: &[f64], prefix: &str, grads: &mut GradStore) {
        let (hn, xn) = (gru.hidden, gru.input);
        let name = |s: &str| -> String { format!("{prefix}{s}") };
        let gates: [(&[f64], &[f64], &str, &str, &str); 3] = [
            (&self.d_pre_z, &cache.h_prev, "w_z", "u_z", "b_z"),
            (&self.d_pre_r, &cache.h_prev, "w_r", "u_r", "b_r"),
            (&self.d_pre_h, &cache.r_h, "w_h", "u_h", "b_h"),
        ];
        for (d, hin, w, u, b) in gates {
            affine_backward_into(&[], xn, x, d, Some(grads.dense_mut(&name(w), hn * xn)), None, None);
            affine_backward_into(&[], hn, hin, d, Some(grads.dense_mut(&name(u), hn * hn)), None, None);
            affine_backward_into(&[], 0, &[], d, None, None, Some(grads.dense_mut(&name(b), hn)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Tensor;

    fn store(hidden: usize, input: usize, mut fill: impl FnMut(&str, usize) -> f64) -> ParamStore {
        let mut s = ParamStore::new(0);
        for (suffix, shape) in GRU_PARAM_SUFFIXES.iter().zip(GruView::param_shapes(hidden, input)) {
            let n: usize = shape.iter().product();
            let vals = (0..n).map(|i| fill(suffix, i)).collect();
            s.insert(format!("gru.{suffix}"), Tensor::from_vec(&shape, vals).unwrap());
        }
        s
    }

    #[test]
    fn zero_params_halve_the_state() {
        let s = store(2, 3, |_, _| 0.0);
        let g = GruView::from_store(&s, "gru.").unwrap();
        let (h, _) = gru_step(&[1.0, -2.0], &[0.3, 9.0, -1.0], &g).unwrap();
        assert_eq!(h, [0.5, -1.0]);
        let (h, _) = gru_step(&[0.0, 0.0], &[0.3, 9.0, -1.0], &g).unwrap();
        assert_eq!(h, [0.0, 0.0]);
    }

    #[test]
    fn one_dim_hand_evaluation() {
        let s = store(1, 1, |name, _| match name {
            "b_z" => 2.0,
            "w_h" => 1.0,
            _ => 0.0,
        });
        let g = GruView::from_store(&s, "gru.").unwrap();
        let (h, _) = gru_step(&[0.0], &[1.0], &g).unwrap();
        let expect = sigmoid(2.0) * tanh(1.0);
        assert!((h[0] - expect).abs() < 1e-15);
        assert!((h[0] - 0.6709).abs() < 1e-4);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let s = store(2, 3, |_, _| 0.0);
        let g = GruView::from_store(&s, "gru.").unwrap();
        assert!(gru_step(&[0.0], &[0.0; 3], &g).is_err());
        assert!(gru_step(&[0.0; 2], &[0.0; 2], &g).is_err());
    }

    #[test]
    fn backward_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (hn, xn) = (3, 4);
        let s = store(hn, xn, |_, _| rng.gen_range(-1.0..1.0));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let h0: Vec<f64> = (0..hn).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x: Vec<f64> = (0..xn).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..hn).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let loss = |s: &ParamStore, h0: &[f64], x: &[f64]| {
            let g = GruView::from_store(s, "gru.").unwrap();
            let (h, _) = gru_step(h0, x, &g).unwrap();
            crate::math::dot(&h, &w)
        };
        let g = GruView::from_store(&s, "gru.").unwrap();
        let (_, cache) = gru_step(&h0, &x, &g).unwrap();
        let back = gru_step_backward(&g, &cache, &w);
        let mut grads = GradStore::new();
        back.accumulate(&g, &cache, &x, "gru.", &mut grads);
        let eps = 1e-5;
        let rel = |a: f64, n: f64| (a - n).abs() / f64::max(1e-8, a.abs() + n.abs());
        for i in 0..xn {
            let (mut a, mut b) = (x.clone(), x.clone());
            a[i] += eps;
            b[i] -= eps;
            let num = (loss(&s, &h0, &a) - loss(&s, &h0, &b)) / (2.0 * eps);
            assert!(rel(back.dx[i], num) < 1e-6);
        }
        for i in 0..hn {
            let (mut a, mut b) = (h0.clone(), h0.clone());
            a[i] += eps;
            b[i] -= eps;
            let num = (loss(&s, &a, &x) - loss(&s, &b, &x)) / (2.0 * eps);
            assert!(rel(back.dh_prev[i], num) < 1e-6);
        }
        for suffix in GRU_PARAM_SUFFIXES {
            let name = format!("gru.{suffix}");
            for i in 0..s.get(&name).unwrap().len() {
                let mut p = s.clone();
                p.get_mut(&name).unwrap().values_mut()[i] += eps;
                let up = loss(&p, &h0, &x);
                p.get_mut(&name).unwrap().values_mut()[i] -= 2.0 * eps;
                let down = loss(&p, &h0, &x);
                let num = (up - down) / (2.0 * eps);
                assert!(rel(grads.at(&name, i), num) < 1e-6, "{name}[{i}]");
            }
        }
    }
}
