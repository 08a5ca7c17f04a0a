use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GradStore, ParamStore};
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct GradCheckOptions {
    /// Largest finite-difference step; Ridders' extrapolation shrinks it.
    pub eps: f64,
    /// Parameters with more entries than this are sampled.
    pub max_coords_per_param: usize,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        Self {
            eps: 1e-4,
            max_coords_per_param: 64,
            seed: 0,
        }
    }
}

/// Compares analytic gradients with numeric ones from Ridders' method.
///
/// Central differences at a shrinking sequence of steps are extrapolated to
/// zero step, and the estimate with the smallest internal error is kept. This
/// avoids both the round-off of a tiny fixed step and the ReLU and max-pool
/// kinks that a wide stencil would straddle.
///
/// `loss_fn(params, grads)` must return the scalar loss and, when `grads` is
/// `Some`, accumulate the analytic gradient into it. Returns the largest
/// `|analytic − numeric| / max(1e-8, |analytic| + |numeric|)` over the
/// checked coordinates.
pub fn grad_check<F>(params: &ParamStore, opts: GradCheckOptions, mut loss_fn: F) -> Result<f64>
where
    F: FnMut(&ParamStore, Option<&mut GradStore>) -> Result<f64>,
{
    let mut analytic = GradStore::new();
    loss_fn(params, Some(&mut analytic))?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut work = params.clone();
    let names: Vec<_> = params.names().map(alloc::string::String::from).collect();
    let mut worst: f64 = 0.0;
    for name in names {
        let n = params.get(&name)?.len();
        let coords: Vec<usize> = if n <= opts.max_coords_per_param {
            (0..n).collect()
        } else {
            sample(&mut rng, n, opts.max_coords_per_param).into_vec()
        };
        for i in coords {
            let orig = work.get(&name)?.values()[i];
            let numeric = ridders(opts.eps, |offset| {
                work.get_mut(&name)?.values_mut()[i] = orig + offset;
                loss_fn(&work, None)
            })?;
            work.get_mut(&name)?.values_mut()[i] = orig;
            let a = analytic.at(&name, i);
            let err = (a - numeric).abs() / f64::max(1e-8, a.abs() + numeric.abs());
            if err > worst {
                log::debug!("grad_check {name}[{i}]: analytic {a} numeric {numeric}");
                worst = err;
            }
        }
    }
    Ok(worst)
}

/// Derivative at offset 0 of `f`, following `dfridr` from Numerical Recipes.
fn ridders(h0: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 10;
    const SAFE: f64 = 2.0;

    let mut central = |h: f64| -> Result<f64> {
        let up = f(h)?;
        let down = f(-h)?;
        Ok((up - down) / (2.0 * h))
    };
    let mut h = h0;
    let mut prev = alloc::vec![central(h)?];
    let mut best = prev[0];
    let mut err = f64::INFINITY;
    for _ in 1..NTAB {
        h /= CON;
        let mut row = Vec::with_capacity(prev.len() + 1);
        row.push(central(h)?);
        let mut fac = CON2;
        for j in 1..=prev.len() {
            let v = (row[j - 1] * fac - prev[j - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = f64::max((v - row[j - 1]).abs(), (v - prev[j - 1]).abs());
            if e <= err {
                err = e;
                best = v;
            }
            row.push(v);
        }
        let last = row.len() - 1;
        if (row[last] - prev[last - 1]).abs() >= SAFE * err {
            break;
        }
        prev = row;
    }
    Ok(best)
}
