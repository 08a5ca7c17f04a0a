use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eval::{evaluate, Decoder};
use super::reinforce::{reinforce_batch_gradient, BatchStats};
use super::xent::xent_batch_gradient;
use super::{RewardConfig, TrainConfig, TrainMode};
use crate::metrics::{classification_accuracy, macro_f1};
use crate::model::Jumper;
use crate::nn::{AdaDeltaState, GradStore, ParamStore};
use crate::text::Paragraph;
use crate::{Error, Result};

/// Runs independent jobs `0..n` and returns their results in index order.
pub trait Executor: Sync {
    fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

/// Seed for example `index` of `epoch` under the run seed (splitmix64 mixing).
pub fn example_seed(seed: u64, epoch: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(epoch.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Splits `0..n` into fixed chunks, accumulates each chunk's gradient with
/// `f`, and merges the chunk results in order.
pub(crate) fn chunked<E, F>(exec: &E, n: usize, chunk: usize, f: F) -> Result<(GradStore, BatchStats)>
where
    E: Executor + ?Sized,
    F: Fn(usize, &mut GradStore) -> Result<BatchStats> + Sync + Send,
{
    let chunks = n.div_ceil(chunk);
    let parts = exec.map(chunks, |c| -> Result<(GradStore, BatchStats)> {
        let mut grads = GradStore::new();
        let mut stats = BatchStats::default();
        for j in c * chunk..((c + 1) * chunk).min(n) {
            stats.merge(&f(j, &mut grads)?);
        }
        Ok((grads, stats))
    });
    let mut grads = GradStore::new();
    let mut stats = BatchStats::default();
    for part in parts {
        let (g, s) = part?;
        grads.merge(&g);
        stats.merge(&s);
    }
    Ok((grads, stats))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean final reward of the gradient rollouts; for the cross-entropy
    /// comparator, the training accuracy of the last-step argmax.
    pub train_reward_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub train_loss_mean: Option<f64>,
    #[serde(rename = "dev_CA")]
    pub dev_ca: Option<f64>,
    #[serde(rename = "dev_F1")]
    pub dev_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: Option<usize>,
    pub best_dev_ca: Option<f64>,
}

/// Dev-set CA and macro F1, each averaged over slots.
fn dev_scores<E: Executor + ?Sized>(
    model: &Jumper,
    params: &ParamStore,
    dev: &[Paragraph],
    decoder: Decoder,
    exec: &E,
) -> Result<(f64, f64)> {
    let recs = evaluate(model, params, dev, None, decoder, exec)?;
    let mut ca = 0.0;
    let mut f1 = 0.0;
    for (slot, r) in recs.iter().enumerate() {
        ca += classification_accuracy(r)?;
        f1 += macro_f1(r, model.schema.slots[slot].num_actions())?;
    }
    let n = recs.len() as f64;
    Ok((ca / n, f1 / n))
}

/// Trains `params` in place with shuffled mini-batches and one AdaDelta step
/// per batch. When `dev` is non-empty, training stops after `patience` epochs
/// without a dev CA improvement and `params` ends at the best epoch's values.
/// `observer` sees every epoch record as it is produced.
#[allow(clippy::too_many_arguments)]
pub fn train<E: Executor + ?Sized>(
    model: &Jumper,
    params: &mut ParamStore,
    train: &[Paragraph],
    dev: &[Paragraph],
    cfg: &TrainConfig,
    reward: &RewardConfig,
    exec: &E,
    observer: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainReport> {
    cfg.validate()?;
    reward.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyInput("training set is empty"));
    }
    model.check_params(params)?;
    for ex in train.iter().chain(dev) {
        ex.validate(model.vocab_size)?;
        if ex.labels.len() != model.num_slots() {
            return Err(Error::Shape {
                op: "train",
                left: alloc::vec![model.num_slots()],
                right: alloc::vec![ex.labels.len()],
            });
        }
    }

    let decoder = Decoder::for_mode(cfg.mode, model.config.fallback_non_default);
    let mut opt = AdaDeltaState::new(cfg.optimizer);
    let mut report = TrainReport::default();
    let mut best: Option<ParamStore> = None;
    let mut since_best = 0;
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 1..=cfg.max_epochs {
        let e = epoch as u64;
        order.sort_unstable();
        order.shuffle(&mut rng_for(example_seed(cfg.seed, e, u64::MAX)));
        let mut totals = BatchStats::default();
        for (b, idx) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<&Paragraph> = idx.iter().map(|&i| &train[i]).collect();
            let seeds: Vec<u64> = (0..idx.len())
                .map(|k| example_seed(cfg.seed, e, (b * cfg.batch_size + k) as u64))
                .collect();
            let (grads, stats) = match cfg.mode {
                TrainMode::Reinforce => reinforce_batch_gradient(model, params, &batch, &seeds, reward, exec)?,
                TrainMode::CrossEntropy => xent_batch_gradient(model, params, &batch, &seeds, exec)?,
            };
            opt.update(params, &grads)?;
            totals.merge(&stats);
        }

        let (dev_ca, dev_f1) = if dev.is_empty() {
            (None, None)
        } else {
            let (ca, f1) = dev_scores(model, params, dev, decoder, exec)?;
            (Some(ca), Some(f1))
        };
        let n = totals.examples as f64;
        let record = EpochRecord {
            epoch,
            train_reward_mean: totals.reward_sum / n,
            train_loss_mean: (cfg.mode == TrainMode::CrossEntropy).then(|| totals.loss_sum / n),
            dev_ca,
            dev_f1,
        };
        log::info!(
            "epoch {epoch}: train reward {:.4}, dev CA {}",
            record.train_reward_mean,
            dev_ca.map_or("-".into(), |c| alloc::format!("{c:.4}"))
        );
        observer(&record);
        report.epochs.push(record);

        if let Some(ca) = dev_ca {
            if report.best_dev_ca.map_or(true, |b| ca > b) {
                report.best_dev_ca = Some(ca);
                report.best_epoch = Some(epoch);
                best = Some(params.clone());
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= cfg.patience {
                    log::info!("early stop after epoch {epoch}; best epoch {:?}", report.best_epoch);
                    break;
                }
            }
        }
    }
    if let Some(b) = best {
        *params = b;
    }
    Ok(report)
}

/// [`train`] with the cross-entropy objective on the last step's distributions.
pub fn train_xent<E: Executor + ?Sized>(
    model: &Jumper,
    params: &mut ParamStore,
    train_set: &[Paragraph],
    dev: &[Paragraph],
    cfg: &TrainConfig,
    exec: &E,
    observer: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainReport> {
    let cfg = TrainConfig {
        mode: TrainMode::CrossEntropy,
        ..cfg.clone()
    };
    train(model, params, train_set, dev, &cfg, &RewardConfig::default(), exec, observer)
}
