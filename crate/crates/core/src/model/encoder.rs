use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::Jumper;
use crate::math::{axpy, dot};
use crate::nn::{apply_mask, dropout_mask, relu, GradStore, ParamStore};
use crate::text::PAD;
use crate::{Error, Result};

/// Output of the CNN encoder for one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceEncoding {
    /// Feature vector passed to the controller (after dropout when training).
    pub c: Vec<f64>,
    /// Max-pooled features before dropout.
    pub pooled: Vec<f64>,
    /// Start position of the winning window for each feature.
    pub pool_argmax: Vec<usize>,
    /// Inverted-dropout scale per feature, when dropout was applied.
    pub mask: Option<Vec<f64>>,
    pub tokens: Vec<usize>,
}

impl Jumper {
    /// Right-pads with zeros (the PAD embedding) to at least `min_len` words.
    fn embed_window_buffer(&self, params: &ParamStore, tokens: &[usize], min_len: usize) -> Result<Vec<f64>> {
        let d = self.config.encoder.embed_dim;
        let table = params.get(&self.layout.embed)?;
        let len = tokens.len().max(min_len);
        let mut x = vec![0.0; len * d];
        for (i, &t) in tokens.iter().enumerate() {
            if t >= table.rows() {
                return Err(Error::Invalid(alloc::format!("token id {t} outside the embedding table")));
            }
            x[i * d..(i + 1) * d].copy_from_slice(table.row(t));
        }
        Ok(x)
    }

    /// `c_k = max_i ReLU(w_k · x_{i:i+h−1} + b_k)` for every kernel, with the
    /// winning start position. Sentences shorter than a window are zero-padded
    /// so that window has exactly one position.
    pub fn encode_sentence<R: Rng + ?Sized>(
        &self,
        params: &ParamStore,
        tokens: &[usize],
        train_mode: bool,
        rng: &mut R,
    ) -> Result<SentenceEncoding> {
        if tokens.is_empty() {
            return Err(Error::EmptyInput("sentence has no tokens"));
        }
        let enc = &self.config.encoder;
        let (d, maps) = (enc.embed_dim, enc.maps_per_window);
        let max_h = enc.window_sizes.iter().copied().max().unwrap_or(1);
        let x = self.embed_window_buffer(params, tokens, max_h)?;
        let len = tokens.len();

        let k_total = self.feature_dim();
        let mut pooled = vec![0.0; k_total];
        let mut pool_argmax = vec![0; k_total];
        for (wi, &h) in enc.window_sizes.iter().enumerate() {
            let w = params.get(&self.layout.conv_w[wi])?.values();
            let b = params.get(&self.layout.conv_b[wi])?.values();
            let positions = len.max(h) - h + 1;
            let hd = h * d;
            for m in 0..maps {
                let wm = &w[m * hd..(m + 1) * hd];
                let mut best = relu(b[m] + dot(wm, &x[..hd]));
                let mut best_i = 0;
                for i in 1..positions {
                    let v = relu(b[m] + dot(wm, &x[i * d..i * d + hd]));
                    if v > best {
                        best = v;
                        best_i = i;
                    }
                }
                pooled[wi * maps + m] = best;
                pool_argmax[wi * maps + m] = best_i;
            }
        }

        let mut c = pooled.clone();
        let mask = if train_mode && enc.dropout > 0.0 {
            let m = dropout_mask(k_total, enc.dropout, rng);
            apply_mask(&mut c, &m);
            Some(m)
        } else {
            None
        };
        Ok(SentenceEncoding {
            c,
            pooled,
            pool_argmax,
            mask,
            tokens: tokens.to_vec(),
        })
    }

    /// Recomputes the pre-activation of feature `k` at its stored argmax window.
    pub fn conv_feature_at_argmax(&self, params: &ParamStore, enc: &SentenceEncoding, k: usize) -> Result<f64> {
        let cfg = &self.config.encoder;
        let (d, maps) = (cfg.embed_dim, cfg.maps_per_window);
        let (wi, m) = (k / maps, k % maps);
        let h = cfg.window_sizes[wi];
        let x = self.embed_window_buffer(params, &enc.tokens, cfg.window_sizes.iter().copied().max().unwrap_or(1))?;
        let w = params.get(&self.layout.conv_w[wi])?.values();
        let b = params.get(&self.layout.conv_b[wi])?.values();
        let p = enc.pool_argmax[k];
        Ok(relu(b[m] + dot(&w[m * h * d..(m + 1) * h * d], &x[p * d..(p + h) * d])))
    }

    /// Backpropagates `dc` (gradient w.r.t. [`SentenceEncoding::c`]) into the
    /// convolution weights and the embedding rows of the words in the winning
    /// windows. The PAD row never receives gradient.
    pub(crate) fn encoder_backward(
        &self,
        params: &ParamStore,
        enc: &SentenceEncoding,
        dc: &[f64],
        grads: &mut GradStore,
    ) -> Result<()> {
        let cfg = &self.config.encoder;
        let (d, maps) = (cfg.embed_dim, cfg.maps_per_window);
        let max_h = cfg.window_sizes.iter().copied().max().unwrap_or(1);
        let x = self.embed_window_buffer(params, &enc.tokens, max_h)?;
        let mut dx = vec![0.0; x.len()];
        let mut touched = false;
        for (wi, &h) in cfg.window_sizes.iter().enumerate() {
            let hd = h * d;
            let w = params.get(&self.layout.conv_w[wi])?.values();
            let mut any = false;
            for m in 0..maps {
                let k = wi * maps + m;
                let g = dc[k] * enc.mask.as_ref().map_or(1.0, |mk| mk[k]);
                if g != 0.0 && enc.pooled[k] > 0.0 {
                    any = true;
                    let p = enc.pool_argmax[k];
                    axpy(g, &w[m * hd..(m + 1) * hd], &mut dx[p * d..p * d + hd]);
                }
            }
            if !any {
                continue;
            }
            touched = true;
            let dw = grads.dense_mut(&self.layout.conv_w[wi], maps * hd);
            for m in 0..maps {
                let k = wi * maps + m;
                let g = dc[k] * enc.mask.as_ref().map_or(1.0, |mk| mk[k]);
                if g != 0.0 && enc.pooled[k] > 0.0 {
                    let p = enc.pool_argmax[k];
                    axpy(g, &x[p * d..p * d + hd], &mut dw[m * hd..(m + 1) * hd]);
                }
            }
            let db = grads.dense_mut(&self.layout.conv_b[wi], maps);
            for m in 0..maps {
                let k = wi * maps + m;
                let g = dc[k] * enc.mask.as_ref().map_or(1.0, |mk| mk[k]);
                if g != 0.0 && enc.pooled[k] > 0.0 {
                    db[m] += g;
                }
            }
        }
        if touched {
            for (i, &t) in enc.tokens.iter().enumerate() {
                if t == PAD {
                    continue;
                }
                let src = &dx[i * d..(i + 1) * d];
                if src.iter().any(|&v| v != 0.0) {
                    let row = grads.row_mut(&self.layout.embed, t, d);
                    row.iter_mut().zip(src).for_each(|(a, b)| *a += b);
                }
            }
        }
        Ok(())
    }
}
