use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{symbolic_update, Jumper, SentenceEncoding, SymbolicState};
use crate::math::argmax;
use crate::nn::{GruCache, ParamStore};
use crate::rl::sample_action;
use crate::{Error, Result};

/// How actions are chosen from the policy distributions.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionMode {
    /// Most probable action, lowest index on ties.
    Greedy,
    /// Sample from the policy, or uniformly with probability `epsilon`.
    Sample { epsilon: f64 },
    /// Prescribed actions, indexed `[step][slot]`.
    Fixed(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub encoding: SentenceEncoding,
    pub gru_input: Vec<f64>,
    pub gru_cache: GruCache,
    pub h: Vec<f64>,
    pub dists: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub states: Vec<SymbolicState>,
}

/// Everything recorded while reading one paragraph.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub steps: Vec<StepRecord>,
    /// 1-based jump step per slot; `T` when the slot never jumped.
    pub jump_steps: Vec<usize>,
}

impl EpisodeTrace {
    /// Number of sentences `T`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_state(&self, slot: usize) -> SymbolicState {
        self.steps[self.steps.len() - 1].states[slot]
    }

    pub fn jumped(&self, slot: usize) -> bool {
        !self.final_state(slot).is_none()
    }

    /// State of `slot` after step `t` (1-based).
    pub fn state(&self, t: usize, slot: usize) -> SymbolicState {
        self.steps[t - 1].states[slot]
    }
}

impl Jumper {
    pub fn initial_states(&self) -> Vec<SymbolicState> {
        self.schema.action_counts().into_iter().map(SymbolicState::none).collect()
    }

    pub fn encode_paragraph<R: Rng + ?Sized>(
        &self,
        params: &ParamStore,
        sentences: &[Vec<usize>],
        train_mode: bool,
        rng: &mut R,
    ) -> Result<Vec<SentenceEncoding>> {
        if sentences.is_empty() {
            return Err(Error::EmptyInput("paragraph has no sentences"));
        }
        sentences
            .iter()
            .map(|s| self.encode_sentence(params, s, train_mode, rng))
            .collect()
    }

    /// Reads a paragraph sentence by sentence from `h_0 = 0` and all states
    /// `None`, choosing actions per `mode` and applying the one-jump rule.
    pub fn forward_paragraph<R: Rng + ?Sized>(
        &self,
        params: &ParamStore,
        sentences: &[Vec<usize>],
        mode: &ActionMode,
        train_mode: bool,
        rng: &mut R,
    ) -> Result<EpisodeTrace> {
        let encodings = self.encode_paragraph(params, sentences, train_mode, rng)?;
        self.run_controller(params, &encodings, mode, rng)
    }

    /// The controller and symbolic layer over precomputed sentence encodings.
    pub fn run_controller<R: Rng + ?Sized>(
        &self,
        params: &ParamStore,
        encodings: &[SentenceEncoding],
        mode: &ActionMode,
        rng: &mut R,
    ) -> Result<EpisodeTrace> {
        let t_len = encodings.len();
        if t_len == 0 {
            return Err(Error::EmptyInput("paragraph has no sentences"));
        }
        if let ActionMode::Fixed(a) = mode {
            if a.len() < t_len || a.iter().any(|row| row.len() != self.num_slots()) {
                return Err(Error::Invalid("fixed actions do not cover every step and slot".into()));
            }
        }
        let mut h = vec![0.0; self.config.hidden];
        let mut states = self.initial_states();
        let mut jump_steps = vec![t_len; self.num_slots()];
        let mut steps = Vec::with_capacity(t_len);
        for (t, enc) in encodings.iter().enumerate() {
            let out = self.controller_step(params, &h, enc, &states)?;
            let actions: Vec<usize> = match mode {
                ActionMode::Greedy => out.dists.iter().map(|d| argmax(d)).collect(),
                ActionMode::Sample { epsilon } => out.dists.iter().map(|d| sample_action(d, *epsilon, rng)).collect(),
                ActionMode::Fixed(a) => a[t].clone(),
            };
            for (i, &a) in actions.iter().enumerate() {
                let next = symbolic_update(states[i], a)?;
                if states[i].is_none() && !next.is_none() {
                    jump_steps[i] = t + 1;
                }
                states[i] = next;
            }
            h = out.h.clone();
            steps.push(StepRecord {
                encoding: enc.clone(),
                gru_input: out.gru_input,
                gru_cache: out.gru_cache,
                h: out.h,
                dists: out.dists,
                actions,
                states: states.clone(),
            });
        }
        Ok(EpisodeTrace { steps, jump_steps })
    }
}

/// The slot's final symbolic state; when that is `None` and
/// `fallback_non_default` is set, the most probable non-`None` class of the
/// last step's distribution.
pub fn final_prediction(trace: &EpisodeTrace, slot: usize, fallback_non_default: bool) -> usize {
    let s = trace.final_state(slot);
    if !s.is_none() || !fallback_non_default {
        return s.class();
    }
    let last = &trace.steps[trace.len() - 1].dists[slot];
    1 + argmax(&last[1..])
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn greedy_is_deterministic() {
        let m = tiny(true);
        let p = random_params(&m, 9, 0.5);
        let a = m.forward_paragraph(&p, &paragraph(), &ActionMode::Greedy, false, &mut rng(1)).unwrap();
        let b = m.forward_paragraph(&p, &paragraph(), &ActionMode::Greedy, false, &mut rng(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_params_never_jump() {
        let m = tiny(true);
        let mut p = m.init_params(0, None).unwrap();
        p.iter_mut().for_each(|(_, t)| t.values_mut().iter_mut().for_each(|v| *v = 0.0));
        let tr = m.forward_paragraph(&p, &paragraph(), &ActionMode::Greedy, false, &mut rng(0)).unwrap();
        assert!(tr.steps.iter().all(|s| s.actions.iter().all(|&a| a == 0)));
        assert_eq!(tr.jump_steps, [4, 4]);
        assert!(!tr.jumped(0));
    }

    #[test]
    fn prefix_property() {
        let m = tiny(true);
        let p = random_params(&m, 4, 1.0);
        let full = m.forward_paragraph(&p, &paragraph(), &ActionMode::Greedy, false, &mut rng(0)).unwrap();
        for t in 1..=4 {
            let part = m
                .forward_paragraph(&p, &paragraph()[..t], &ActionMode::Greedy, false, &mut rng(0))
                .unwrap();
            assert_eq!(part.steps[..], full.steps[..t]);
        }
    }

    #[test]
    fn fixed_actions_respect_one_jump() {
        let m = tiny(false);
        let p = random_params(&m, 4, 0.5);
        let acts = vec![vec![0, 0], vec![2, 1], vec![1, 0], vec![0, 1]];
        let tr = m
            .forward_paragraph(&p, &paragraph(), &ActionMode::Fixed(acts), false, &mut rng(0))
            .unwrap();
        let classes: Vec<usize> = (1..=4).map(|t| tr.state(t, 0).class()).collect();
        assert_eq!(classes, [0, 2, 2, 2]);
        assert_eq!(tr.jump_steps, [2, 2]);
        for s in &tr.steps {
            for d in &s.dists {
                assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn final_prediction_examples() {
        let m = tiny(false);
        let p = random_params(&m, 4, 0.5);
        let jump = vec![vec![2, 0], vec![0, 0], vec![0, 0], vec![0, 0]];
        let tr = m.forward_paragraph(&p, &paragraph(), &ActionMode::Fixed(jump), false, &mut rng(0)).unwrap();
        assert_eq!(final_prediction(&tr, 0, false), 2);
        assert_eq!(final_prediction(&tr, 1, false), 0);

        let mut tr = tr;
        let last = tr.steps.len() - 1;
        tr.steps[last].dists[1] = vec![0.6, 0.4];
        assert_eq!(final_prediction(&tr, 1, true), 1);
        tr.steps[last].states[0] = SymbolicState::none(3);
        tr.steps[last].dists[0] = vec![0.6, 0.3, 0.1];
        assert_eq!(final_prediction(&tr, 0, true), 1);
    }
}
