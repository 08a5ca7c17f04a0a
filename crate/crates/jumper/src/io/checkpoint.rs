//! Binary checkpoint: `JMPRCKPT`, a little-endian u32 format version, a u64
//! manifest length, the JSON manifest, then every parameter as little-endian
//! f32 values in manifest order.
//!
//! Values are stored at 32-bit precision; loading widens them back to f64, so
//! a store that was rounded with `ParamStore::round_to_f32` survives a round
//! trip bit for bit.

use std::path::Path;

use jumper_core::model::Jumper;
use jumper_core::nn::{ParamStore, Tensor};
use jumper_core::text::{SlotSchema, Vocabulary};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{IoError, IoResult};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"JMPRCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEntry {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    config: RunConfig,
    schema: SlotSchema,
    vocab: Vec<String>,
    rng_seed: u64,
    params: Vec<ParamEntry>,
}

/// Everything needed to rebuild a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: RunConfig,
    pub schema: SlotSchema,
    pub vocab: Vocabulary,
    pub params: ParamStore,
}

impl Checkpoint {
    pub fn model(&self) -> jumper_core::Result<Jumper> {
        Jumper::new(self.config.model.clone(), self.schema.clone(), self.vocab.len())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let manifest = Manifest {
            format_version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            schema: self.schema.clone(),
            vocab: self.vocab.tokens().to_vec(),
            rng_seed: self.params.rng_seed(),
            params: self
                .params
                .iter()
                .map(|(name, t)| ParamEntry {
                    name: name.to_string(),
                    shape: t.shape().to_vec(),
                })
                .collect(),
        };
        let json = serde_json::to_vec(&manifest).expect("manifest serializes");
        let mut out = Vec::with_capacity(20 + json.len() + 4 * self.params.num_values());
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        for (_, t) in self.params.iter() {
            for &v in t.values() {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        out
    }

    /// Parses a checkpoint; `path` is only used in error messages.
    pub fn from_bytes(path: &Path, bytes: &[u8]) -> IoResult<Self> {
        let bad = |msg: &str| IoError::invalid(path, format!("not a checkpoint: {msg}"));
        if bytes.len() < 20 || &bytes[..8] != CHECKPOINT_MAGIC {
            return Err(bad("missing header"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != CHECKPOINT_VERSION {
            return Err(IoError::invalid(
                path,
                format!("checkpoint format {version}, expected {CHECKPOINT_VERSION}"),
            ));
        }
        let len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
        let body = &bytes[20..];
        if body.len() < len {
            return Err(bad("truncated manifest"));
        }
        let manifest: Manifest =
            serde_json::from_slice(&body[..len]).map_err(|e| IoError::invalid(path, format!("manifest: {e}")))?;
        let mut data = &body[len..];
        let mut params = ParamStore::new(manifest.rng_seed);
        for entry in &manifest.params {
            let n: usize = entry.shape.iter().product();
            if data.len() < 4 * n {
                return Err(bad("truncated parameter data"));
            }
            let values = data[..4 * n]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                .collect();
            data = &data[4 * n..];
            let t = Tensor::from_vec(&entry.shape, values).map_err(|e| IoError::invalid(path, e))?;
            params.insert(entry.name.clone(), t);
        }
        if !data.is_empty() {
            return Err(bad("trailing bytes"));
        }
        let ckpt = Checkpoint {
            config: manifest.config,
            schema: manifest.schema,
            vocab: Vocabulary::from(manifest.vocab),
            params,
        };
        let model = ckpt.model().map_err(|e| IoError::invalid(path, e))?;
        model.check_params(&ckpt.params).map_err(|e| IoError::invalid(path, e))?;
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> IoResult<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| IoError::io(path, e))
    }

    pub fn load(path: &Path) -> IoResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
        Self::from_bytes(path, &bytes)
    }
}
