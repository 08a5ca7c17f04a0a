//! AdaDelta with a multiplicative learning-rate scale.
//!
//! ```text
//! E[g²]  ← ρ E[g²] + (1 − ρ) g²
//! Δ      = −√(E[Δx²] + ε) / √(E[g²] + ε) · g
//! E[Δx²] ← ρ E[Δx²] + (1 − ρ) Δ²
//! x      ← x + lr_scale · Δ
//! ```
//!
//! The accumulator tracks the unscaled update, so `lr_scale` only shrinks the
//! applied step and the unit-correcting ratio still grows as usual.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{GradBuf, GradStore, ParamStore};
use crate::math::sqrt;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaDeltaConfig {
    pub rho: f64,
    pub eps: f64,
    pub lr_scale: f64,
}

impl Default for AdaDeltaConfig {
    fn default() -> Self {
        Self {
            rho: 0.95,
            eps: 1e-6,
            lr_scale: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaDeltaState {
    pub config: AdaDeltaConfig,
    sq_grad: BTreeMap<String, Vec<f64>>,
    sq_delta: BTreeMap<String, Vec<f64>>,
}

impl AdaDeltaState {
    pub fn new(config: AdaDeltaConfig) -> Self {
        Self {
            config,
            sq_grad: BTreeMap::new(),
            sq_delta: BTreeMap::new(),
        }
    }

    /// Running average of squared gradients for a parameter, if it has been updated.
    pub fn sq_grad(&self, name: &str) -> Option<&[f64]> {
        self.sq_grad.get(name).map(Vec::as_slice)
    }

    pub fn sq_delta(&self, name: &str) -> Option<&[f64]> {
        self.sq_delta.get(name).map(Vec::as_slice)
    }

    /// Applies one update to every parameter in `params`. Parameters without a
    /// gradient entry are treated as having a zero gradient. Nothing is
    /// modified when any gradient is non-finite.
    pub fn update(&mut self, params: &mut ParamStore, grads: &GradStore) -> Result<()> {
        if let Some(name) = grads.first_non_finite() {
            return Err(Error::NonFiniteGradient(name.to_string()));
        }
        let AdaDeltaConfig { rho, eps, lr_scale } = self.config;
        for (name, tensor) in params.iter_mut() {
            let n = tensor.len();
            let eg = self.sq_grad.entry(name.to_string()).or_insert_with(|| vec![0.0; n]);
            let ed = self.sq_delta.entry(name.to_string()).or_insert_with(|| vec![0.0; n]);
            let values = tensor.values_mut();
            let mut step = |i: usize, g: f64| {
                eg[i] = rho * eg[i] + (1.0 - rho) * g * g;
                let delta = -sqrt(ed[i] + eps) / sqrt(eg[i] + eps) * g;
                ed[i] = rho * ed[i] + (1.0 - rho) * delta * delta;
                values[i] += lr_scale * delta;
            };
            match grads.get(name) {
                Some(GradBuf::Dense(g)) => {
                    for (i, &gi) in g.iter().enumerate() {
                        step(i, gi);
                    }
                }
                Some(GradBuf::Rows { width, rows }) => {
                    let mut next = 0;
                    for (&r, row) in rows {
                        for i in next..r * width {
                            step(i, 0.0);
                        }
                        for (j, &gi) in row.iter().enumerate() {
                            step(r * width + j, gi);
                        }
                        next = (r + 1) * width;
                    }
                    for i in next..n {
                        step(i, 0.0);
                    }
                }
                None => {
                    for i in 0..n {
                        step(i, 0.0);
                    }
                }
            }
        }
        Ok(())
    }
}
