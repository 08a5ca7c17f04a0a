//! CNN sentence encoder, GRU controller with per-slot policy heads, and the
//! one-jump symbolic output layer.

mod backward;
mod controller;
mod encoder;
mod episode;
mod symbolic;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use controller::ControllerOutput;
pub use encoder::SentenceEncoding;
pub use backward::LogitGrads;
pub use episode::{final_prediction, ActionMode, EpisodeTrace, StepRecord};
pub use symbolic::{symbolic_update, SymbolicState};

use crate::nn::{GruView, ParamStore, Tensor, GRU_PARAM_SUFFIXES};
use crate::text::{EmbeddingTable, SlotSchema, PAD};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncoderConfig {
    pub window_sizes: Vec<usize>,
    pub maps_per_window: usize,
    /// Dropout probability on the pooled feature vector, train time only.
    pub dropout: f64,
    pub embed_dim: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            window_sizes: vec![1, 2, 3, 4, 5],
            maps_per_window: 200,
            dropout: 0.5,
            embed_dim: 300,
        }
    }
}

impl EncoderConfig {
    /// Total feature count `K`.
    pub fn feature_dim(&self) -> usize {
        self.window_sizes.len() * self.maps_per_window
    }

    /// Window size of feature `k`.
    pub fn window_of(&self, k: usize) -> usize {
        self.window_sizes[k / self.maps_per_window]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub encoder: EncoderConfig,
    /// GRU hidden size.
    pub hidden: usize,
    /// Feed every slot's previous symbolic state back into the GRU input.
    pub sharing: bool,
    /// At the end of a paragraph still in `None`, predict the most likely
    /// non-default class instead.
    pub fallback_non_default: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            encoder: EncoderConfig::default(),
            hidden: 20,
            sharing: false,
            fallback_non_default: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Layout {
    embed: String,
    conv_w: Vec<String>,
    conv_b: Vec<String>,
    policy_w: Vec<String>,
    policy_b: Vec<String>,
}

pub(crate) const GRU_PREFIX: &str = "gru.";

/// Model definition: configuration, slot schema and vocabulary size.
/// Parameters are kept separately in a [`ParamStore`].
#[derive(Debug, Clone, PartialEq)]
pub struct Jumper {
    pub config: ModelConfig,
    pub schema: SlotSchema,
    pub vocab_size: usize,
    layout: Layout,
}

impl Jumper {
    pub fn new(config: ModelConfig, schema: SlotSchema, vocab_size: usize) -> Result<Self> {
        let enc = &config.encoder;
        if enc.window_sizes.is_empty() || enc.window_sizes.contains(&0) {
            return Err(Error::InvalidConfig("window sizes must be non-empty and ≥ 1".into()));
        }
        if enc.maps_per_window == 0 || enc.embed_dim == 0 || config.hidden == 0 {
            return Err(Error::InvalidConfig("maps, embedding size and hidden size must be ≥ 1".into()));
        }
        if !(0.0..1.0).contains(&enc.dropout) {
            return Err(Error::InvalidConfig(format!("dropout {} outside [0, 1)", enc.dropout)));
        }
        if vocab_size < 2 {
            return Err(Error::InvalidConfig("vocabulary must hold PAD and UNK".into()));
        }
        schema.validate()?;
        let n = enc.window_sizes.len();
        let layout = Layout {
            embed: "embed".into(),
            conv_w: (0..n).map(|i| format!("conv.{i}.w")).collect(),
            conv_b: (0..n).map(|i| format!("conv.{i}.b")).collect(),
            policy_w: (0..schema.len()).map(|i| format!("policy.{i}.w")).collect(),
            policy_b: (0..schema.len()).map(|i| format!("policy.{i}.b")).collect(),
        };
        Ok(Self {
            config,
            schema,
            vocab_size,
            layout,
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.config.encoder.feature_dim()
    }

    pub fn num_slots(&self) -> usize {
        self.schema.len()
    }

    /// Length of the GRU input: `K`, plus `Σ (N_i + 1)` with decision sharing.
    pub fn gru_input_dim(&self) -> usize {
        let extra: usize = if self.config.sharing {
            self.schema.action_counts().iter().sum()
        } else {
            0
        };
        self.feature_dim() + extra
    }

    pub fn param_shapes(&self) -> Vec<(String, Vec<usize>)> {
        let enc = &self.config.encoder;
        let (k, h) = (self.feature_dim(), self.config.hidden);
        let mut out = vec![(self.layout.embed.clone(), vec![self.vocab_size, enc.embed_dim])];
        for (i, &w) in enc.window_sizes.iter().enumerate() {
            out.push((self.layout.conv_w[i].clone(), vec![enc.maps_per_window, w * enc.embed_dim]));
            out.push((self.layout.conv_b[i].clone(), vec![enc.maps_per_window]));
        }
        for (suffix, shape) in GRU_PARAM_SUFFIXES.iter().zip(GruView::param_shapes(h, self.gru_input_dim())) {
            out.push((format!("{GRU_PREFIX}{suffix}"), shape));
        }
        for (i, a) in self.schema.action_counts().into_iter().enumerate() {
            out.push((self.layout.policy_w[i].clone(), vec![a, k + h]));
            out.push((self.layout.policy_b[i].clone(), vec![a]));
        }
        out
    }

    /// Fresh parameters drawn uniformly from [-0.01, 0.01]; embedding rows come
    /// from `embeddings` when given. The PAD row is zero.
    pub fn init_params(&self, seed: u64, embeddings: Option<&EmbeddingTable>) -> Result<ParamStore> {
        let mut params = ParamStore::initialized(seed, self.param_shapes())?;
        if let Some(table) = embeddings {
            if table.rows() != self.vocab_size || table.dim != self.config.encoder.embed_dim {
                return Err(Error::Shape {
                    op: "init_params",
                    left: vec![self.vocab_size, self.config.encoder.embed_dim],
                    right: vec![table.rows(), table.dim],
                });
            }
            params.insert(self.layout.embed.clone(), table.to_tensor());
        }
        let d = self.config.encoder.embed_dim;
        params.get_mut(&self.layout.embed)?.values_mut()[PAD * d..(PAD + 1) * d]
            .iter_mut()
            .for_each(|v| *v = 0.0);
        Ok(params)
    }

    /// Checks that `params` has every parameter with the expected shape.
    pub fn check_params(&self, params: &ParamStore) -> Result<()> {
        for (name, shape) in self.param_shapes() {
            let t: &Tensor = params.get(&name)?;
            if t.shape() != shape.as_slice() {
                return Err(Error::Shape {
                    op: "check_params",
                    left: shape,
                    right: t.shape().to_vec(),
                });
            }
        }
        Ok(())
    }

    fn gru<'a>(&self, params: &'a ParamStore) -> Result<GruView<'a>> {
        GruView::from_store(params, GRU_PREFIX)
    }
}
