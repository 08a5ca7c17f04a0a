use alloc::vec::Vec;

use rand::Rng;

use super::reinforce::{BatchStats, CHUNK};
use super::train::Executor;
use crate::math::{argmax, ln};
use crate::model::{ActionMode, EpisodeTrace, Jumper};
use crate::nn::{GradStore, ParamStore};
use crate::text::Paragraph;
use crate::Result;

/// `Σ_i −log π_T^(i)(gold_i)` at the last sentence, read with greedy actions.
/// When `grads` is given the gradient, multiplied by `scale`, is accumulated.
/// Also returns the fraction of slots whose last-step argmax is the gold class.
pub fn xent_loss<R: Rng + ?Sized>(
    model: &Jumper,
    params: &ParamStore,
    example: &Paragraph,
    train_mode: bool,
    scale: f64,
    rng: &mut R,
    grads: Option<&mut GradStore>,
) -> Result<(f64, f64)> {
    let trace = model.forward_paragraph(params, &example.sentences, &ActionMode::Greedy, train_mode, rng)?;
    let last = trace.len() - 1;
    let mut loss = 0.0;
    let mut hits = 0usize;
    let mut dl = model.empty_logit_grads(&trace);
    for (slot, &gold) in example.labels.iter().enumerate() {
        let dist = &trace.steps[last].dists[slot];
        loss -= ln(dist[gold]);
        if argmax(dist) == gold {
            hits += 1;
        }
        let mut g: Vec<f64> = dist.iter().map(|p| scale * p).collect();
        g[gold] -= scale;
        dl[last][slot] = Some(g);
    }
    if let Some(g) = grads {
        model.backward(params, &trace, &dl, true, Some(g))?;
    }
    Ok((loss, hits as f64 / model.num_slots() as f64))
}

pub fn xent_batch_gradient<E: Executor + ?Sized>(
    model: &Jumper,
    params: &ParamStore,
    batch: &[&Paragraph],
    seeds: &[u64],
    exec: &E,
) -> Result<(GradStore, BatchStats)> {
    let n = batch.len();
    super::train::chunked(exec, n, CHUNK, |j, grads| {
        let mut rng = super::train::rng_for(seeds[j]);
        let (loss, acc) = xent_loss(model, params, batch[j], true, 1.0 / n as f64, &mut rng, Some(grads))?;
        Ok(BatchStats {
            reward_sum: acc,
            loss_sum: loss,
            examples: 1,
        })
    })
}

/// First step whose argmax is not `None`, with that class; `(0, T)` if none.
pub fn xent_first_prediction(trace: &EpisodeTrace, slot: usize) -> (usize, usize) {
    for (t, step) in trace.steps.iter().enumerate() {
        let a = argmax(&step.dists[slot]);
        if a != 0 {
            return (a, t + 1);
        }
    }
    (0, trace.len())
}
