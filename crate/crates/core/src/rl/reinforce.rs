use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::reward::{cumulative_reward, final_reward, step_returns};
use super::train::Executor;
use super::RewardConfig;
use crate::model::{ActionMode, EpisodeTrace, Jumper, LogitGrads};
use crate::nn::{GradStore, ParamStore};
use crate::text::Paragraph;
use crate::Result;

/// Totals over the gradient rollouts of a batch.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BatchStats {
    /// Sum over examples of the mean final reward across slots.
    pub reward_sum: f64,
    /// Sum over examples of the cross-entropy loss (comparator mode).
    pub loss_sum: f64,
    pub examples: usize,
}

impl BatchStats {
    pub fn merge(&mut self, other: &BatchStats) {
        self.reward_sum += other.reward_sum;
        self.loss_sum += other.loss_sum;
        self.examples += other.examples;
    }
}

/// Gradients of the surrogate loss `−Σ_i Σ_{t ≤ T_jump} A_t log π_t(a_t) / (N T)`
/// with respect to every policy head's logits: `A / (N T) · (π − onehot(a))`.
pub fn reinforce_logit_grads(
    model: &Jumper,
    trace: &EpisodeTrace,
    golds: &[usize],
    baselines: &[f64],
    cfg: &RewardConfig,
    batch_size: usize,
) -> LogitGrads {
    let mut dl = model.empty_logit_grads(trace);
    let norm = 1.0 / (batch_size as f64 * trace.len() as f64);
    for (slot, &gold) in golds.iter().enumerate() {
        for (t, ret) in step_returns(trace, slot, gold, cfg).into_iter().enumerate() {
            let mut adv = ret - baselines[slot];
            if cfg.truncate_negative {
                adv = adv.max(0.0);
            }
            if adv == 0.0 {
                continue;
            }
            let coef = adv * norm;
            let step = &trace.steps[t];
            let mut g: Vec<f64> = step.dists[slot].iter().map(|p| coef * p).collect();
            g[step.actions[slot]] -= coef;
            dl[t][slot] = Some(g);
        }
    }
    dl
}

/// One example's REINFORCE contribution, accumulated into `grads`.
///
/// The paragraph is encoded once (with a fresh dropout mask); the gradient
/// rollout and the `baseline_samples` baseline rollouts all read that encoding.
/// Returns the gradient rollout's mean final reward over slots.
pub fn reinforce_example_gradient<R: Rng + ?Sized>(
    model: &Jumper,
    params: &ParamStore,
    example: &Paragraph,
    cfg: &RewardConfig,
    batch_size: usize,
    rng: &mut R,
    grads: &mut GradStore,
) -> Result<f64> {
    let mode = ActionMode::Sample { epsilon: cfg.epsilon };
    let encs = model.encode_paragraph(params, &example.sentences, true, rng)?;
    let trace = model.run_controller(params, &encs, &mode, rng)?;
    let mut baselines = vec![0.0; model.num_slots()];
    if cfg.baseline_samples > 0 {
        for _ in 0..cfg.baseline_samples {
            let roll = model.run_controller(params, &encs, &mode, rng)?;
            for (slot, b) in baselines.iter_mut().enumerate() {
                *b += cumulative_reward(&roll, slot, 1, example.labels[slot], cfg)?;
            }
        }
        baselines.iter_mut().for_each(|b| *b /= cfg.baseline_samples as f64);
    }
    let dl = reinforce_logit_grads(model, &trace, &example.labels, &baselines, cfg, batch_size);
    if dl.iter().flatten().any(Option::is_some) {
        model.backward(params, &trace, &dl, true, Some(grads))?;
    }
    let reward: f64 = (0..model.num_slots())
        .map(|s| final_reward(trace.final_state(s).class(), example.labels[s]))
        .sum();
    Ok(reward / model.num_slots() as f64)
}

/// Examples per independently accumulated gradient chunk. Chunk boundaries do
/// not depend on the executor, so the summation order is fixed.
pub(crate) const CHUNK: usize = 5;

/// Batch gradient: the sum of per-example contributions, each already scaled
/// by `1 / batch.len()`. `seeds[j]` seeds example `j`'s random stream.
pub fn reinforce_batch_gradient<E: Executor + ?Sized>(
    model: &Jumper,
    params: &ParamStore,
    batch: &[&Paragraph],
    seeds: &[u64],
    cfg: &RewardConfig,
    exec: &E,
) -> Result<(GradStore, BatchStats)> {
    let n = batch.len();
    super::train::chunked(exec, n, CHUNK, |j, grads| {
        let mut rng = super::train::rng_for(seeds[j]);
        let reward = reinforce_example_gradient(model, params, batch[j], cfg, n, &mut rng, grads)?;
        Ok(BatchStats {
            reward_sum: reward,
            loss_sum: 0.0,
            examples: 1,
        })
    })
}
