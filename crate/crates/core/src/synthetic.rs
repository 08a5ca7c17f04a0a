//! Planted-evidence corpus: each paragraph has exactly one sentence holding a
//! class-specific trigger word; every other word is a neutral filler.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::text::{Slot, SlotSchema};
use crate::Result;

const TRIGGERS: [&str; 8] = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub paragraphs: usize,
    pub classes: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub min_words: usize,
    pub max_words: usize,
    /// Number of distinct filler words.
    pub fillers: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            paragraphs: 2000,
            classes: 3,
            min_sentences: 4,
            max_sentences: 6,
            min_words: 3,
            max_words: 7,
            fillers: 300,
            seed: 17,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticExample {
    pub text: String,
    pub label: String,
    /// 0-based index of the trigger sentence.
    pub gold_jump: usize,
    /// 0-based word position of the trigger within that sentence.
    pub trigger_position: usize,
    pub trigger: String,
}

pub fn trigger_word(class: usize) -> String {
    match TRIGGERS.get(class) {
        Some(t) => (*t).into(),
        None => format!("trigger{class}"),
    }
}

/// Single-slot schema `label` with classes `c0, c1, …`.
pub fn schema(classes: usize) -> Result<SlotSchema> {
    SlotSchema::new(alloc::vec![Slot {
        name: "label".into(),
        classes: (0..classes).map(|c| format!("c{c}")).collect(),
    }])
}

pub fn generate(cfg: &SyntheticConfig) -> Vec<SyntheticExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.paragraphs)
        .map(|_| {
            let class = rng.gen_range(0..cfg.classes);
            let n = rng.gen_range(cfg.min_sentences..=cfg.max_sentences);
            let key = rng.gen_range(0..n);
            let mut trigger_position = 0;
            let sentences: Vec<String> = (0..n)
                .map(|s| {
                    let len = rng.gen_range(cfg.min_words..=cfg.max_words);
                    let mut words: Vec<String> = (0..len).map(|_| format!("w{}", rng.gen_range(0..cfg.fillers))).collect();
                    if s == key {
                        trigger_position = rng.gen_range(0..len);
                        words[trigger_position] = trigger_word(class);
                    }
                    let end = if s + 1 == n || rng.gen_bool(0.5) { "." } else { "," };
                    format!("{}{end}", words.join(" "))
                })
                .collect();
            SyntheticExample {
                text: sentences.join(" "),
                label: format!("c{class}"),
                gold_jump: key,
                trigger_position,
                trigger: trigger_word(class),
            }
        })
        .collect()
}

/// Random stand-ins for pretrained word vectors: every token gets a vector
/// drawn from uniform[-scale, scale], with `scale` chosen to match the
/// per-coordinate spread of common 300-d pretrained vectors when 0.7.
pub fn pseudo_embeddings<'a, I>(tokens: I, dim: usize, scale: f64, seed: u64) -> Vec<(String, Vec<f64>)>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tokens
        .into_iter()
        .map(|t| (String::from(t), (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect()))
        .collect()
}
