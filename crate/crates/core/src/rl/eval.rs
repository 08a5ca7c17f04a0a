use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::train::Executor;
use super::xent::xent_first_prediction;
use super::TrainMode;
use crate::math::argmax;
use crate::metrics::EvalRecord;
use crate::model::{final_prediction, ActionMode, EpisodeTrace, Jumper};
use crate::nn::ParamStore;
use crate::text::Paragraph;
use crate::{Error, Result};

/// How a greedy trace is turned into one class and jump step per slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoder {
    /// The symbolic layer's final state; jump step from the trace.
    Symbolic { fallback: bool },
    /// First step whose argmax leaves `None` (the cross-entropy comparator).
    FirstNonNone { fallback: bool },
}

impl Decoder {
    pub fn for_mode(mode: TrainMode, fallback: bool) -> Self {
        match mode {
            TrainMode::Reinforce => Decoder::Symbolic { fallback },
            TrainMode::CrossEntropy => Decoder::FirstNonNone { fallback },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub classes: Vec<usize>,
    /// 1-based; `num_sentences` for slots that never left `None`.
    pub jump_steps: Vec<usize>,
    /// Whether the class came from the most-likely-non-default rule.
    pub fallback_used: Vec<bool>,
    pub num_sentences: usize,
}

/// Greedy read of a paragraph, decoded per `decoder`. With `fallback` set, a
/// slot that ends in `None` takes the most probable non-`None` class of the
/// last step.
pub fn predict(
    model: &Jumper,
    params: &ParamStore,
    sentences: &[Vec<usize>],
    decoder: Decoder,
) -> Result<(Prediction, EpisodeTrace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let trace = model.forward_paragraph(params, sentences, &ActionMode::Greedy, false, &mut rng)?;
    let t_len = trace.len();
    let mut pred = Prediction {
        classes: Vec::with_capacity(model.num_slots()),
        jump_steps: Vec::with_capacity(model.num_slots()),
        fallback_used: Vec::with_capacity(model.num_slots()),
        num_sentences: t_len,
    };
    for slot in 0..model.num_slots() {
        let (class, step, fallback) = match decoder {
            Decoder::Symbolic { fallback } => {
                let c = final_prediction(&trace, slot, fallback);
                (c, trace.jump_steps[slot], fallback && trace.final_state(slot).is_none())
            }
            Decoder::FirstNonNone { fallback } => match xent_first_prediction(&trace, slot) {
                (0, t) if fallback => (1 + argmax(&trace.steps[t_len - 1].dists[slot][1..]), t, true),
                (c, t) => (c, t, false),
            },
        };
        pred.classes.push(class);
        pred.jump_steps.push(step);
        pred.fallback_used.push(fallback);
    }
    Ok((pred, trace))
}

/// Per-slot evaluation records (`out[slot][example]`). `gold_jumps[j][slot]`
/// holds 1-based gold jump steps where annotated.
pub fn evaluate<E: Executor + ?Sized>(
    model: &Jumper,
    params: &ParamStore,
    data: &[Paragraph],
    gold_jumps: Option<&[Vec<Option<usize>>]>,
    decoder: Decoder,
    exec: &E,
) -> Result<Vec<Vec<EvalRecord>>> {
    if data.is_empty() {
        return Err(Error::EmptyInput("no examples to evaluate"));
    }
    if let Some(g) = gold_jumps {
        if g.len() != data.len() {
            return Err(Error::Shape {
                op: "evaluate",
                left: vec![data.len()],
                right: vec![g.len()],
            });
        }
    }
    let preds = exec.map(data.len(), |j| predict(model, params, &data[j].sentences, decoder).map(|(p, _)| p));
    let mut out = vec![Vec::with_capacity(data.len()); model.num_slots()];
    for (j, pred) in preds.into_iter().enumerate() {
        let pred = pred?;
        for (slot, recs) in out.iter_mut().enumerate() {
            recs.push(EvalRecord {
                pred: pred.classes[slot],
                gold: data[j].labels[slot],
                pred_jump: pred.jump_steps[slot],
                gold_jump: gold_jumps.and_then(|g| g[j].get(slot).copied().flatten()),
                num_sentences: pred.num_sentences,
            });
        }
    }
    Ok(out)
}
