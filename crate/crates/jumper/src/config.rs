//! Run configuration: the full hyperparameter tree plus file locations.

use std::path::{Path, PathBuf};

use jumper_core::model::ModelConfig;
use jumper_core::rationale::RationaleConfig;
use jumper_core::rl::{RewardConfig, TrainConfig};
use jumper_core::text::TextLimits;
use serde::{Deserialize, Serialize};

use crate::error::{IoError, IoResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub schema: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    /// Pretrained vectors, one `token v1 … vd` per line.
    pub embeddings: Option<PathBuf>,
    pub min_count: usize,
    /// Share of the training file held out for early stopping when no dev file is given.
    pub dev_fraction: f64,
    pub limits: TextLimits,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            schema: None,
            train: None,
            dev: None,
            embeddings: None,
            min_count: 1,
            dev_fraction: 0.05,
            limits: TextLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub reward: RewardConfig,
    pub train: TrainConfig,
    pub rationale: RationaleConfig,
    pub data: DataConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> IoResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| IoError::format(path, e.line(), e))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
