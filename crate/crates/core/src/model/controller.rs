use alloc::vec;
use alloc::vec::Vec;

use super::{Jumper, SentenceEncoding, SymbolicState};
use crate::nn::{affine_forward_into, gru_step, softmax_slice, GruCache, ParamStore};
use crate::{Error, Result};

/// One controller step: new hidden state and one policy distribution per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerOutput {
    pub h: Vec<f64>,
    pub dists: Vec<Vec<f64>>,
    pub gru_input: Vec<f64>,
    pub gru_cache: GruCache,
}

impl Jumper {
    /// GRU input for a step: the sentence features, followed by the one-hot
    /// previous state of every slot when decision sharing is on.
    pub fn gru_input(&self, c: &[f64], prev_states: &[SymbolicState]) -> Result<Vec<f64>> {
        if prev_states.len() != self.num_slots() {
            return Err(Error::Shape {
                op: "controller_step",
                left: vec![self.num_slots()],
                right: vec![prev_states.len()],
            });
        }
        let mut input = c.to_vec();
        if self.config.sharing {
            for (s, slot) in prev_states.iter().zip(&self.schema.slots) {
                if s.actions() != slot.num_actions() {
                    return Err(Error::Shape {
                        op: "controller_step",
                        left: vec![slot.num_actions()],
                        right: vec![s.actions()],
                    });
                }
                input.extend(s.one_hot());
            }
        }
        Ok(input)
    }

    /// `h_t = GRU(h_{t−1}, input)`, then `π_t^(i) = softmax(W_p^(i) [c_t ⊕ h_t] + b_p^(i))`.
    pub fn controller_step(
        &self,
        params: &ParamStore,
        h_prev: &[f64],
        enc: &SentenceEncoding,
        prev_states: &[SymbolicState],
    ) -> Result<ControllerOutput> {
        let gru_input = self.gru_input(&enc.c, prev_states)?;
        let (h, gru_cache) = gru_step(h_prev, &gru_input, &self.gru(params)?)?;
        let q = [enc.c.as_slice(), h.as_slice()].concat();
        let mut dists = Vec::with_capacity(self.num_slots());
        for (i, a) in self.schema.action_counts().into_iter().enumerate() {
            let w = params.get(&self.layout.policy_w[i])?;
            let b = params.get(&self.layout.policy_b[i])?;
            let mut logits = vec![0.0; a];
            affine_forward_into(w.values(), q.len(), &q, b.values(), &mut logits);
            dists.push(softmax_slice(&logits));
        }
        Ok(ControllerOutput {
            h,
            dists,
            gru_input,
            gru_cache,
        })
    }
}
