//! Rewards, the REINFORCE estimator, the cross-entropy comparator, greedy
//! evaluation and the training loop.

mod eval;
mod reinforce;
mod reward;
mod train;
mod xent;

use serde::{Deserialize, Serialize};

use crate::nn::AdaDeltaConfig;
use crate::{Error, Result};

pub use eval::{evaluate, predict, Decoder, Prediction};
pub use reinforce::{reinforce_batch_gradient, reinforce_example_gradient, reinforce_logit_grads, BatchStats};
pub use reward::{cumulative_reward, final_reward, intermediate_reward, sample_action, step_returns};
pub use train::{example_seed, train, train_xent, EpochRecord, Executor, Sequential, TrainReport};
pub use xent::{xent_batch_gradient, xent_first_prediction, xent_loss};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    /// Reward per step while a slot is still `None`.
    pub intermediate_r: f64,
    pub gamma: f64,
    /// Probability of a uniform action during sampled rollouts.
    pub epsilon: f64,
    /// Extra rollouts per example used only for the baseline; 0 disables it.
    pub baseline_samples: usize,
    /// Clamp the post-baseline advantage at zero.
    pub truncate_negative: bool,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            intermediate_r: 0.05,
            gamma: 0.9,
            epsilon: 0.1,
            baseline_samples: 5,
            truncate_negative: true,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) || !(0.0..=1.0).contains(&self.epsilon) || self.intermediate_r < 0.0 {
            return Err(Error::InvalidConfig(
                "reward config needs 0 ≤ gamma ≤ 1, 0 ≤ epsilon ≤ 1 and intermediate_r ≥ 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    #[default]
    Reinforce,
    #[serde(alias = "xent")]
    CrossEntropy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a dev CA improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    pub mode: TrainMode,
    pub optimizer: AdaDeltaConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 50,
            max_epochs: 30,
            patience: 5,
            seed: 0,
            mode: TrainMode::Reinforce,
            optimizer: AdaDeltaConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be ≥ 1".into()));
        }
        Ok(())
    }
}
