use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::RewardConfig;
use crate::model::{EpisodeTrace, SymbolicState};
use crate::{Error, Result};

pub fn final_reward(pred: usize, gold: usize) -> f64 {
    if pred == gold {
        1.0
    } else {
        0.0
    }
}

pub fn intermediate_reward(state: SymbolicState, cfg: &RewardConfig) -> f64 {
    if state.is_none() {
        cfg.intermediate_r
    } else {
        0.0
    }
}

fn check_step(trace: &EpisodeTrace, slot: usize, t: usize) -> Result<usize> {
    let t_jump = trace.jump_steps[slot];
    if t == 0 || t > t_jump {
        return Err(Error::StepOutOfRange { t, max: t_jump });
    }
    Ok(t_jump)
}

/// `Σ_{t'=t}^{T_jump} γ^{t'−t} R_int(s_{t'}) + R_final`, summed directly.
pub fn cumulative_reward(trace: &EpisodeTrace, slot: usize, t: usize, gold: usize, cfg: &RewardConfig) -> Result<f64> {
    let t_jump = check_step(trace, slot, t)?;
    let mut sum = 0.0;
    let mut discount = 1.0;
    for tp in t..=t_jump {
        sum += discount * intermediate_reward(trace.state(tp, slot), cfg);
        discount *= cfg.gamma;
    }
    Ok(sum + final_reward(trace.final_state(slot).class(), gold))
}

/// `R_t` for every `t` in `1..=T_jump` by the backward recursion
/// `R_t = R_int(t) + γ (R_{t+1} − R_final) + R_final`.
pub fn step_returns(trace: &EpisodeTrace, slot: usize, gold: usize, cfg: &RewardConfig) -> Vec<f64> {
    let t_jump = trace.jump_steps[slot];
    let r_final = final_reward(trace.final_state(slot).class(), gold);
    let mut out = vec![0.0; t_jump];
    let mut acc = 0.0;
    for t in (1..=t_jump).rev() {
        acc = intermediate_reward(trace.state(t, slot), cfg) + cfg.gamma * acc;
        out[t - 1] = acc + r_final;
    }
    out
}

/// With probability `epsilon` a uniform action, otherwise a draw from `dist`.
pub fn sample_action<R: Rng + ?Sized>(dist: &[f64], epsilon: f64, rng: &mut R) -> usize {
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return rng.gen_range(0..dist.len());
    }
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(dist.len() - 1)
}
