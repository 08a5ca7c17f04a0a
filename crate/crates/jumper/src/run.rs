//! The pipelines behind the commands: training from files, evaluation,
//! prediction and explanation against a loaded checkpoint.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use jumper_core::metrics::{classification_accuracy, MetricsReport};
use jumper_core::rationale::{explain_slot, ExplainRecord};
use jumper_core::rl::{evaluate, predict, train, Decoder, EpochRecord, Executor, TrainReport};
use jumper_core::text::{
    split_dataset, tokenize, EmbeddingTable, Paragraph, Slot, SlotSchema, SplitScheme, Vocabulary,
};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::io::{
    build_vocab, load_pretrained_embeddings, read_corpus, read_rationale_gold, read_schema, to_paragraphs, Checkpoint,
};

/// A bad command-line request (as opposed to a failure while running it).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// One line of the training report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportLine {
    #[serde(flatten)]
    pub record: EpochRecord,
    pub elapsed_s: f64,
}

/// Training and dev paragraphs plus the vocabulary built from the training file.
#[derive(Debug, Clone)]
pub struct TrainingData {
    pub schema: SlotSchema,
    pub vocab: Vocabulary,
    pub train: Vec<Paragraph>,
    pub dev: Vec<Paragraph>,
}

fn required<'a>(p: &'a Option<std::path::PathBuf>, what: &str) -> Result<&'a Path> {
    match p {
        Some(p) => Ok(p),
        None => Err(UsageError(format!("no {what} given (flag or `data.{what}` in the config)")).into()),
    }
}

/// Reads the schema and corpora named in `cfg.data`. Without a dev file,
/// `dev_fraction` of the training file is held out (seeded by the run seed).
pub fn load_training_data(cfg: &RunConfig) -> Result<TrainingData> {
    let schema = read_schema(required(&cfg.data.schema, "schema")?)?;
    let train_path = required(&cfg.data.train, "train")?;
    let records = read_corpus(train_path)?;
    if records.is_empty() {
        bail!("{}: no training examples", train_path.display());
    }
    let vocab = build_vocab(&records, cfg.data.min_count);
    let all = to_paragraphs(train_path, &records, &schema, &vocab, &cfg.data.limits)?;
    let (train, dev) = match &cfg.data.dev {
        Some(dev_path) => {
            let dev_records = read_corpus(dev_path)?;
            (all, to_paragraphs(dev_path, &dev_records, &schema, &vocab, &cfg.data.limits)?)
        }
        None => {
            let split = split_dataset(
                all.len(),
                SplitScheme::Holdout {
                    dev_fraction: cfg.data.dev_fraction,
                },
                cfg.train.seed,
            )?;
            let (tr, dv) = split.fold(0);
            let pick = |idx: Vec<usize>| idx.into_iter().map(|i| all[i].clone()).collect::<Vec<_>>();
            (pick(tr), pick(dv))
        }
    };
    if train.is_empty() {
        bail!("{}: nothing left to train on after holding out dev", train_path.display());
    }
    Ok(TrainingData {
        schema,
        vocab,
        train,
        dev,
    })
}

/// Initializes parameters (with pretrained vectors when configured), trains,
/// and packages the best parameters rounded to checkpoint precision.
pub fn train_checkpoint<E: Executor>(
    cfg: &RunConfig,
    data: &TrainingData,
    exec: &E,
    on_epoch: &mut dyn FnMut(&ReportLine),
) -> Result<(Checkpoint, TrainReport)> {
    let table = match &cfg.data.embeddings {
        Some(path) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.train.seed ^ 0xE3B);
            let t = load_pretrained_embeddings(path, &data.vocab, Some(cfg.model.encoder.embed_dim), &mut rng)?;
            let hits = t.pretrained.iter().filter(|&&p| p).count();
            log::info!("{hits} of {} vocabulary rows found in {}", data.vocab.len(), path.display());
            Some(t)
        }
        None => None,
    };
    train_checkpoint_with_embeddings(cfg, data, table.as_ref(), exec, on_epoch)
}

/// [`train_checkpoint`] with an embedding table supplied directly.
pub fn train_checkpoint_with_embeddings<E: Executor>(
    cfg: &RunConfig,
    data: &TrainingData,
    table: Option<&EmbeddingTable>,
    exec: &E,
    on_epoch: &mut dyn FnMut(&ReportLine),
) -> Result<(Checkpoint, TrainReport)> {
    let model = jumper_core::Jumper::new(cfg.model.clone(), data.schema.clone(), data.vocab.len())?;
    let mut params = model.init_params(cfg.train.seed, table)?;
    log::info!(
        "training on {} examples ({} dev), {} parameters",
        data.train.len(),
        data.dev.len(),
        params.num_values()
    );
    let start = Instant::now();
    let report = train(
        &model,
        &mut params,
        &data.train,
        &data.dev,
        &cfg.train,
        &cfg.reward,
        exec,
        &mut |r| {
            on_epoch(&ReportLine {
                record: r.clone(),
                elapsed_s: start.elapsed().as_secs_f64(),
            })
        },
    )?;
    params.round_to_f32();
    let ckpt = Checkpoint {
        config: cfg.clone(),
        schema: data.schema.clone(),
        vocab: data.vocab.clone(),
        params,
    };
    Ok((ckpt, report))
}

pub fn decoder(ckpt: &Checkpoint) -> Decoder {
    Decoder::for_mode(ckpt.config.train.mode, ckpt.config.model.fallback_non_default)
}

/// Reads a corpus with the checkpoint's schema and vocabulary.
pub fn load_eval_data(ckpt: &Checkpoint, path: &Path) -> Result<Vec<Paragraph>> {
    let records = read_corpus(path)?;
    Ok(to_paragraphs(
        path,
        &records,
        &ckpt.schema,
        &ckpt.vocab,
        &ckpt.config.data.limits,
    )?)
}

/// Greedy evaluation. JA and OA appear only when gold jumps are given.
pub fn evaluate_checkpoint<E: Executor>(
    ckpt: &Checkpoint,
    data: &[Paragraph],
    gold_path: Option<&Path>,
    exec: &E,
) -> Result<MetricsReport> {
    let model = ckpt.model()?;
    let gold = gold_path
        .map(|p| read_rationale_gold(p, &ckpt.schema, data.len()))
        .transpose()?;
    let recs = evaluate(&model, &ckpt.params, data, gold.as_deref(), decoder(ckpt), exec)?;
    Ok(MetricsReport::compute(&ckpt.schema, &recs)?)
}

/// One line of `predict` output. `jump_step` is 1-based; a slot that never
/// jumped reports the paragraph length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionLine {
    pub id: usize,
    pub labels: BTreeMap<String, String>,
    pub jump_step: BTreeMap<String, usize>,
}

pub fn predict_lines<E: Executor>(ckpt: &Checkpoint, data: &[Paragraph], exec: &E) -> Result<Vec<PredictionLine>> {
    let model = ckpt.model()?;
    let dec = decoder(ckpt);
    let preds = exec.map(data.len(), |j| predict(&model, &ckpt.params, &data[j].sentences, dec));
    preds
        .into_iter()
        .enumerate()
        .map(|(id, p)| {
            let (p, _) = p?;
            let mut labels = BTreeMap::new();
            let mut jump_step = BTreeMap::new();
            for (slot, s) in ckpt.schema.slots.iter().enumerate() {
                labels.insert(s.name.clone(), s.display_name(p.classes[slot]).to_string());
                jump_step.insert(s.name.clone(), p.jump_steps[slot]);
            }
            Ok(PredictionLine { id, labels, jump_step })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotExplanation {
    pub slot: String,
    /// Action names; index 0 is `None`.
    pub actions: Vec<String>,
    /// Policy distribution at every step, one row per sentence read.
    pub distributions: Vec<Vec<f64>>,
    pub jump_step: usize,
    pub prediction: String,
    /// Present when the slot never left `None` and the fallback rule picked a class.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fallback_prediction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rationale: Option<ExplainRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub sentences: Vec<String>,
    pub slots: Vec<SlotExplanation>,
}

/// Greedy read of `text` with per-step distributions and, for every slot that
/// jumped, word importances over the jump sentence.
pub fn explain_text(ckpt: &Checkpoint, text: &str, slot: Option<&str>) -> Result<Explanation> {
    let model = ckpt.model()?;
    let slots: Vec<usize> = match slot {
        Some(name) => match ckpt.schema.slot_index(name) {
            Some(i) => vec![i],
            None => {
                let valid: Vec<&str> = ckpt.schema.slots.iter().map(|s| s.name.as_str()).collect();
                return Err(UsageError(format!("unknown slot `{name}`; valid slots: {}", valid.join(", "))).into());
            }
        },
        None => (0..ckpt.schema.len()).collect(),
    };
    let para = Paragraph::from_text(
        text,
        &ckpt.vocab,
        vec![0; ckpt.schema.len()],
        &ckpt.config.data.limits,
    )
    .context("reading input text")?;
    let (pred, trace) = predict(&model, &ckpt.params, &para.sentences, decoder(ckpt))?;
    let mut out = Vec::with_capacity(slots.len());
    for i in slots {
        let s = &ckpt.schema.slots[i];
        let rationale = if trace.jumped(i) {
            let t = trace.jump_steps[i];
            let mut tokens = tokenize(&para.raw_sentences[t - 1]);
            tokens.truncate(para.sentences[t - 1].len());
            explain_slot(&model, &ckpt.params, &trace, i, &tokens, &ckpt.config.rationale)?
        } else {
            None
        };
        let prediction = s.display_name(pred.classes[i]).to_string();
        out.push(SlotExplanation {
            slot: s.name.clone(),
            actions: (0..s.num_actions()).map(|a| s.display_name(a).to_string()).collect(),
            distributions: trace.steps.iter().map(|st| st.dists[i].clone()).collect(),
            jump_step: pred.jump_steps[i],
            fallback_prediction: pred.fallback_used[i].then(|| prediction.clone()),
            prediction,
            rationale,
        });
    }
    Ok(Explanation {
        sentences: para.raw_sentences,
        slots: out,
    })
}

/// k-fold cross-validated accuracy on a single-slot corpus with pretrained
/// vectors, using the default configuration with the fallback rule on. The
/// slot and its classes are read off the corpus; the vocabulary covers the
/// whole file. Each training fold holds out `dev_fraction` for early stopping.
pub fn cross_validate_file(corpus: &Path, embeddings: &Path, k: usize) -> Result<f64> {
    let records = read_corpus(corpus)?;
    let mut slot_name = None;
    let mut classes = std::collections::BTreeSet::new();
    for (_, r) in &records {
        for (name, label) in &r.labels {
            slot_name.get_or_insert_with(|| name.clone());
            if let Some(l) = label {
                classes.insert(l.clone());
            }
        }
    }
    let slot_name = slot_name.with_context(|| format!("{}: no labels", corpus.display()))?;
    let schema = SlotSchema::new(vec![Slot {
        name: slot_name,
        classes: classes.into_iter().collect(),
    }])?;
    let mut cfg = RunConfig::default();
    cfg.model.fallback_non_default = true;
    let vocab = build_vocab(&records, cfg.data.min_count);
    let all = to_paragraphs(corpus, &records, &schema, &vocab, &cfg.data.limits)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.train.seed);
    let table = load_pretrained_embeddings(embeddings, &vocab, Some(cfg.model.encoder.embed_dim), &mut rng)?;
    let folds = split_dataset(all.len(), SplitScheme::KFold { k }, cfg.train.seed)?;
    let exec = crate::exec::RayonExecutor::from_env();
    let mut total = 0.0;
    for fold in 0..k {
        let (train_idx, test_idx) = folds.fold(fold);
        let inner = split_dataset(
            train_idx.len(),
            SplitScheme::Holdout {
                dev_fraction: cfg.data.dev_fraction,
            },
            cfg.train.seed + fold as u64,
        )?;
        let (tr, dv) = inner.fold(0);
        let data = TrainingData {
            schema: schema.clone(),
            vocab: vocab.clone(),
            train: tr.iter().map(|&i| all[train_idx[i]].clone()).collect(),
            dev: dv.iter().map(|&i| all[train_idx[i]].clone()).collect(),
        };
        let (ckpt, _) = train_checkpoint_with_embeddings(&cfg, &data, Some(&table), &exec, &mut |l| {
            log::info!("fold {fold}: {}", serde_json::to_string(l).unwrap_or_default())
        })?;
        let test: Vec<Paragraph> = test_idx.iter().map(|&i| all[i].clone()).collect();
        let model = ckpt.model()?;
        let recs = evaluate(&model, &ckpt.params, &test, None, decoder(&ckpt), &exec)?;
        let acc = classification_accuracy(&recs[0])?;
        log::info!("fold {fold}: test accuracy {acc:.4}");
        total += acc;
    }
    Ok(total / k as f64)
}
