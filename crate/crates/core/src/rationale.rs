//! Word-level rationales for a jump decision.
//!
//! The feature dimensions that both changed most between the previous and the
//! jump sentence and that most raise the probability of the jump are selected,
//! then each is traced back through its max-pooling argmax to the words of
//! the winning window.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{EncoderConfig, EpisodeTrace, Jumper, SentenceEncoding};
use crate::nn::ParamStore;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RationaleConfig {
    pub top_d: usize,
}

impl Default for RationaleConfig {
    fn default() -> Self {
        Self { top_d: 10 }
    }
}

/// Per-word credit within one sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordImportance {
    /// 0-based index of the sentence the weights refer to.
    pub sentence: usize,
    pub weights: Vec<f64>,
}

impl WordImportance {
    /// Position with the largest weight, lowest index on ties.
    pub fn top_word(&self) -> Option<usize> {
        if self.weights.is_empty() {
            return None;
        }
        Some(crate::math::argmax(&self.weights))
    }
}

/// Indices of the `d` largest scores `grad ⊙ diff_sq`, lowest index on ties,
/// returned in ascending order.
pub fn select_top_d(grad: &[f64], diff_sq: &[f64], d: usize) -> Vec<usize> {
    let scores: Vec<f64> = grad.iter().zip(diff_sq).map(|(g, s)| g * s).collect();
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(d);
    idx.sort_unstable();
    idx
}

fn check(model: &Jumper, trace: &EpisodeTrace, slot: usize, t: usize, cfg: &RationaleConfig) -> Result<()> {
    if cfg.top_d == 0 || cfg.top_d > model.feature_dim() {
        return Err(Error::InvalidConfig(alloc::format!(
            "top_d must be in 1..={}",
            model.feature_dim()
        )));
    }
    if slot >= model.num_slots() {
        return Err(Error::Invalid(alloc::format!("slot {slot} out of range")));
    }
    if t == 0 || t > trace.len() {
        return Err(Error::StepOutOfRange { t, max: trace.len() });
    }
    if !trace.jumped(slot) || trace.jump_steps[slot] != t {
        return Err(Error::Invalid(alloc::format!("slot {slot} does not jump at step {t}")));
    }
    Ok(())
}

/// `∂ log p_t(a_t) / ∂ c_s` where `a_t` is the action taken by `slot` at step `t`.
fn log_prob_feature_grad(
    model: &Jumper,
    params: &ParamStore,
    trace: &EpisodeTrace,
    slot: usize,
    t: usize,
    s: usize,
) -> Result<Vec<f64>> {
    let step = &trace.steps[t - 1];
    let mut g: Vec<f64> = step.dists[slot].iter().map(|p| -p).collect();
    g[step.actions[slot]] += 1.0;
    let mut dl = model.empty_logit_grads(trace);
    dl[t - 1][slot] = Some(g);
    let mut dc = model.backward(params, trace, &dl, false, None)?;
    Ok(core::mem::take(&mut dc[s - 1]))
}

/// Top-D dimensions of `∂ log p_t(s_t) / ∂ c_{t−1} ⊙ (c_t − c_{t−1})²` for a
/// jump at step `t ≥ 2` (1-based).
pub fn top_d_dims(
    model: &Jumper,
    params: &ParamStore,
    trace: &EpisodeTrace,
    slot: usize,
    t: usize,
    cfg: &RationaleConfig,
) -> Result<Vec<usize>> {
    check(model, trace, slot, t, cfg)?;
    if t == 1 {
        return Err(Error::FirstSentenceJump);
    }
    let grad = log_prob_feature_grad(model, params, trace, slot, t, t - 1)?;
    let (cur, prev) = (&trace.steps[t - 1].encoding.c, &trace.steps[t - 2].encoding.c);
    let diff_sq: Vec<f64> = cur.iter().zip(prev).map(|(a, b)| (a - b) * (a - b)).collect();
    Ok(select_top_d(&grad, &diff_sq, cfg.top_d))
}

/// Rule for a jump at the first sentence: the previous encoding is taken as
/// zero, so the difference is `c_1` itself. No earlier encoding feeds the
/// decision, so the gradient is taken with respect to `c_1`.
pub fn top_d_dims_first_sentence(
    model: &Jumper,
    params: &ParamStore,
    trace: &EpisodeTrace,
    slot: usize,
    cfg: &RationaleConfig,
) -> Result<Vec<usize>> {
    check(model, trace, slot, 1, cfg)?;
    let grad = log_prob_feature_grad(model, params, trace, slot, 1, 1)?;
    let diff_sq: Vec<f64> = trace.steps[0].encoding.c.iter().map(|c| c * c).collect();
    Ok(select_top_d(&grad, &diff_sq, cfg.top_d))
}

/// Traces each dimension to the window that won its max pooling. The window's
/// real (non-padding) words share the dimension's credit equally, and each
/// dimension carries `1 / |dims|` of the total.
pub fn backtrack_words(config: &EncoderConfig, dims: &[usize], enc: &SentenceEncoding, sentence: usize) -> Result<WordImportance> {
    let len = enc.tokens.len();
    let mut weights = vec![0.0; len];
    if dims.is_empty() {
        return Ok(WordImportance { sentence, weights });
    }
    let k_total = config.feature_dim();
    let share = 1.0 / dims.len() as f64;
    for &k in dims {
        if k >= k_total {
            return Err(Error::Invalid(alloc::format!("dimension {k} outside 0..{k_total}")));
        }
        let start = enc.pool_argmax[k];
        let end = (start + config.window_of(k)).min(len);
        let per_word = share / (end - start) as f64;
        for w in &mut weights[start..end] {
            *w += per_word;
        }
    }
    Ok(WordImportance { sentence, weights })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordWeight {
    pub position: usize,
    pub token: String,
    pub weight: f64,
}

/// Rationale for one slot's jump, ready for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainRecord {
    pub slot: String,
    pub jump_step: usize,
    pub dims: Vec<usize>,
    pub word_importance: Vec<WordWeight>,
}

/// Selects dimensions (using the first-sentence rule for `t = 1`) and
/// backtracks them into the jump sentence. `tokens` are the jump sentence's
/// display tokens. Returns `None` when the slot never jumped.
pub fn explain_slot(
    model: &Jumper,
    params: &ParamStore,
    trace: &EpisodeTrace,
    slot: usize,
    tokens: &[String],
    cfg: &RationaleConfig,
) -> Result<Option<ExplainRecord>> {
    if !trace.jumped(slot) {
        return Ok(None);
    }
    let t = trace.jump_steps[slot];
    let dims = if t == 1 {
        top_d_dims_first_sentence(model, params, trace, slot, cfg)?
    } else {
        top_d_dims(model, params, trace, slot, t, cfg)?
    };
    let imp = backtrack_words(&model.config.encoder, &dims, &trace.steps[t - 1].encoding, t - 1)?;
    let word_importance = imp
        .weights
        .iter()
        .enumerate()
        .map(|(position, &weight)| WordWeight {
            position,
            token: tokens.get(position).cloned().unwrap_or_default(),
            weight,
        })
        .collect();
    Ok(Some(ExplainRecord {
        slot: model.schema.slots[slot].name.clone(),
        jump_step: t,
        dims,
        word_importance,
    }))
}
