use alloc::vec;
use alloc::vec::Vec;

use super::{EpisodeTrace, Jumper, GRU_PREFIX};
use crate::nn::{affine_backward_into, gru_step_backward, GradStore, ParamStore};
use crate::{Error, Result};

/// Upstream gradient for each policy head's logits, indexed `[step][slot]`.
/// `None` entries contribute nothing.
pub type LogitGrads = Vec<Vec<Option<Vec<f64>>>>;

impl Jumper {
    /// Backpropagation through time over a recorded trace.
    ///
    /// Returns the gradient with respect to every step's sentence features `c_t`.
    /// When `grads` is given, parameter gradients are accumulated into it; the
    /// convolution and embedding gradients only when `through_encoder` is set.
    pub fn backward(
        &self,
        params: &ParamStore,
        trace: &EpisodeTrace,
        dlogits: &LogitGrads,
        through_encoder: bool,
        mut grads: Option<&mut GradStore>,
    ) -> Result<Vec<Vec<f64>>> {
        let t_len = trace.len();
        if dlogits.len() != t_len {
            return Err(Error::Shape {
                op: "backward",
                left: vec![t_len],
                right: vec![dlogits.len()],
            });
        }
        let gru = self.gru(params)?;
        let (k, hn) = (self.feature_dim(), self.config.hidden);
        let mut dc_all = vec![Vec::new(); t_len];
        let mut dh_next = vec![0.0; hn];
        let mut last_active = None;
        for t in (0..t_len).rev() {
            if dlogits[t].iter().any(Option::is_some) && last_active.is_none() {
                last_active = Some(t);
            }
            let step = &trace.steps[t];
            let mut dq = vec![0.0; k + hn];
            for (i, dl) in dlogits[t].iter().enumerate() {
                let Some(dl) = dl else { continue };
                let w = params.get(&self.layout.policy_w[i])?.values();
                let q = [step.encoding.c.as_slice(), step.h.as_slice()].concat();
                affine_backward_into(w, k + hn, &q, dl, None, Some(&mut dq), None);
                if let Some(g) = grads.as_deref_mut() {
                    let wlen = dl.len() * (k + hn);
                    affine_backward_into(w, k + hn, &q, dl, Some(g.dense_mut(&self.layout.policy_w[i], wlen)), None, None);
                    affine_backward_into(w, 0, &[], dl, None, None, Some(g.dense_mut(&self.layout.policy_b[i], dl.len())));
                }
            }
            if last_active.is_none() {
                dc_all[t] = vec![0.0; k];
                continue;
            }
            let mut dc = dq[..k].to_vec();
            let dh: Vec<f64> = dq[k..].iter().zip(&dh_next).map(|(a, b)| a + b).collect();
            let back = gru_step_backward(&gru, &step.gru_cache, &dh);
            dc.iter_mut().zip(&back.dx[..k]).for_each(|(a, b)| *a += b);
            if let Some(g) = grads.as_deref_mut() {
                back.accumulate(&gru, &step.gru_cache, &step.gru_input, GRU_PREFIX, g);
                if through_encoder {
                    self.encoder_backward(params, &step.encoding, &dc, g)?;
                }
            }
            dh_next = back.dh_prev;
            dc_all[t] = dc;
        }
        Ok(dc_all)
    }

    /// Empty per-step, per-slot logit gradient table for `trace`.
    pub fn empty_logit_grads(&self, trace: &EpisodeTrace) -> LogitGrads {
        vec![vec![None; self.num_slots()]; trace.len()]
    }
}
