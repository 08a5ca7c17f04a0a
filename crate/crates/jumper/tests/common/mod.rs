#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jumper::io::{write_corpus, CorpusRecord, GoldJump};
use jumper::{Checkpoint, RunConfig};
use jumper_core::model::{EncoderConfig, ModelConfig};
use jumper_core::synthetic::{generate, schema, SyntheticConfig};
use jumper_core::text::{SlotSchema, Vocabulary};
use jumper_core::Jumper;

pub fn jumper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jumper"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Small model that trains in well under a second per epoch.
pub fn tiny_model() -> ModelConfig {
    ModelConfig {
        encoder: EncoderConfig {
            window_sizes: vec![1, 2],
            maps_per_window: 6,
            dropout: 0.5,
            embed_dim: 8,
        },
        hidden: 5,
        sharing: false,
        fallback_non_default: true,
    }
}

pub struct Files {
    pub dir: tempfile::TempDir,
    pub schema: PathBuf,
    pub train: PathBuf,
    pub dev: PathBuf,
    pub test: PathBuf,
    pub gold: PathBuf,
    pub config: PathBuf,
}

/// Writes a small synthetic corpus (train/dev/test), its schema, the test
/// set's key-sentence annotations and a tiny-model config.
pub fn synthetic_files(paragraphs: usize, epochs: usize) -> Files {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(&SyntheticConfig {
        paragraphs,
        seed: 3,
        ..SyntheticConfig::default()
    });
    let recs: Vec<CorpusRecord> = data
        .iter()
        .map(|e| CorpusRecord {
            text: e.text.clone(),
            labels: [("label".to_string(), Some(e.label.clone()))].into(),
        })
        .collect();
    let n_train = paragraphs * 3 / 5;
    let n_dev = paragraphs / 5;
    let path = |name: &str| dir.path().join(name);
    write_corpus(&path("train.jsonl"), &recs[..n_train]).unwrap();
    write_corpus(&path("dev.jsonl"), &recs[n_train..n_train + n_dev]).unwrap();
    write_corpus(&path("test.jsonl"), &recs[n_train + n_dev..]).unwrap();
    let gold: Vec<GoldJump> = data[n_train + n_dev..]
        .iter()
        .enumerate()
        .map(|(id, e)| GoldJump {
            id,
            slot: "label".into(),
            gold_jump: e.gold_jump,
        })
        .collect();
    jumper::io::write_jsonl(&path("gold.jsonl"), &gold).unwrap();
    std::fs::write(path("schema.json"), serde_json::to_string(&schema(3).unwrap()).unwrap()).unwrap();
    let mut cfg = RunConfig::default();
    cfg.model = tiny_model();
    cfg.train.max_epochs = epochs;
    cfg.train.batch_size = 10;
    std::fs::write(path("config.json"), cfg.to_json_pretty()).unwrap();
    Files {
        schema: path("schema.json"),
        train: path("train.jsonl"),
        dev: path("dev.jsonl"),
        test: path("test.jsonl"),
        gold: path("gold.jsonl"),
        config: path("config.json"),
        dir,
    }
}

/// A hand-built single-slot model over `{alpha, x, y}`: one window-1 feature
/// fires on `alpha`, and the policy jumps to `yes` exactly when it fires.
/// With `never_jump`, the `None` logit always wins instead.
pub fn trigger_checkpoint(never_jump: bool, fallback: bool) -> Checkpoint {
    let mut config = RunConfig::default();
    config.model = ModelConfig {
        encoder: EncoderConfig {
            window_sizes: vec![1],
            maps_per_window: 1,
            dropout: 0.0,
            embed_dim: 1,
        },
        hidden: 2,
        sharing: false,
        fallback_non_default: fallback,
    };
    config.rationale.top_d = 1;
    let schema = SlotSchema::single("label", &["yes", "no"]).unwrap();
    let vocab = Vocabulary::from_tokens(["alpha", "x", "y", "."].map(String::from));
    let model = Jumper::new(config.model.clone(), schema.clone(), vocab.len()).unwrap();
    let mut params = model.init_params(0, None).unwrap();
    for (_, t) in params.iter_mut() {
        t.values_mut().fill(0.0);
    }
    params.get_mut("embed").unwrap().values_mut()[vocab.id("alpha")] = 1.0;
    params.get_mut("conv.0.w").unwrap().values_mut()[0] = 1.0;
    let w = params.get_mut("policy.0.w").unwrap();
    // Rows are actions (None, yes, no); column 0 is the CNN feature.
    w.row_mut(1)[0] = 20.0;
    w.row_mut(2)[0] = 5.0;
    let b = params.get_mut("policy.0.b").unwrap().values_mut();
    b[0] = if never_jump { 100.0 } else { 10.0 };
    b[2] = 1.0;
    Checkpoint {
        config,
        schema,
        vocab,
        params,
    }
}
