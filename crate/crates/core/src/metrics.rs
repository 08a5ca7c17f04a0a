//! Classification accuracy, jumping accuracy, overall accuracy, reduced
//! reading, macro F1 and the majority-guess baseline.
//!
//! Jump steps are 1-based throughout. Multi-slot summaries are unweighted
//! means over slots.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::text::SlotSchema;
use crate::{Error, Result};

/// One example's outcome for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub pred: usize,
    pub gold: usize,
    /// Predicted jump step, `num_sentences` when the slot never jumped.
    pub pred_jump: usize,
    pub gold_jump: Option<usize>,
    pub num_sentences: usize,
}

impl EvalRecord {
    pub fn correct(&self) -> bool {
        self.pred == self.gold
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    num as f64 / den as f64
}

pub fn classification_accuracy(records: &[EvalRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no records"));
    }
    Ok(ratio(records.iter().filter(|r| r.correct()).count(), records.len()))
}

struct JumpCounts {
    annotated: usize,
    correct: usize,
    both: usize,
}

fn jump_counts(records: &[EvalRecord]) -> JumpCounts {
    let mut c = JumpCounts {
        annotated: 0,
        correct: 0,
        both: 0,
    };
    for r in records {
        let Some(g) = r.gold_jump else { continue };
        c.annotated += 1;
        if r.correct() {
            c.correct += 1;
            if r.pred_jump == g {
                c.both += 1;
            }
        }
    }
    c
}

/// Among annotated records with the correct class, the fraction whose jump
/// step equals the gold step.
pub fn jumping_accuracy(records: &[EvalRecord]) -> Result<f64> {
    let c = jump_counts(records);
    if c.annotated == 0 {
        return Err(Error::UndefinedMetric("jumping accuracy needs gold jump steps"));
    }
    if c.correct == 0 {
        return Err(Error::UndefinedMetric("jumping accuracy with no correctly classified record"));
    }
    Ok(ratio(c.both, c.correct))
}

/// Fraction of annotated records right in both class and jump step. Equals
/// the annotated-subset CA times JA.
pub fn overall_accuracy(records: &[EvalRecord]) -> Result<f64> {
    let c = jump_counts(records);
    if c.annotated == 0 {
        return Err(Error::UndefinedMetric("overall accuracy needs gold jump steps"));
    }
    Ok(ratio(c.both, c.annotated))
}

/// Classification accuracy over the records that carry a gold jump step.
pub fn annotated_accuracy(records: &[EvalRecord]) -> Result<f64> {
    let c = jump_counts(records);
    if c.annotated == 0 {
        return Err(Error::UndefinedMetric("no annotated records"));
    }
    Ok(ratio(c.correct, c.annotated))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedReading {
    pub avg_sentences: f64,
    pub avg_jump: f64,
    pub reduced: f64,
}

/// `1 − mean jump step / mean sentence count`.
pub fn reduced_reading(records: &[EvalRecord]) -> Result<ReducedReading> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no records"));
    }
    let n = records.len() as f64;
    let avg_sentences = records.iter().map(|r| r.num_sentences as f64).sum::<f64>() / n;
    let avg_jump = records.iter().map(|r| r.pred_jump as f64).sum::<f64>() / n;
    Ok(ReducedReading {
        avg_sentences,
        avg_jump,
        reduced: 1.0 - avg_jump / avg_sentences,
    })
}

/// Unweighted mean of per-class F1 over the slot's `num_classes` actions,
/// skipping classes that occur neither in gold nor in predictions.
pub fn macro_f1(records: &[EvalRecord], num_classes: usize) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no records"));
    }
    let mut tp = vec![0usize; num_classes];
    let mut pred = vec![0usize; num_classes];
    let mut gold = vec![0usize; num_classes];
    for r in records {
        if r.pred >= num_classes || r.gold >= num_classes {
            return Err(Error::ActionOutOfRange {
                action: r.pred.max(r.gold),
                actions: num_classes,
            });
        }
        pred[r.pred] += 1;
        gold[r.gold] += 1;
        if r.correct() {
            tp[r.pred] += 1;
        }
    }
    let mut sum = 0.0;
    let mut seen = 0;
    for c in 0..num_classes {
        if pred[c] + gold[c] == 0 {
            continue;
        }
        seen += 1;
        sum += 2.0 * tp[c] as f64 / (pred[c] + gold[c]) as f64;
    }
    Ok(sum / seen as f64)
}

/// Frequency of the most common gold class.
pub fn majority_guess(golds: &[usize]) -> Result<f64> {
    if golds.is_empty() {
        return Err(Error::EmptyInput("no labels"));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &g in golds {
        *counts.entry(g).or_default() += 1;
    }
    Ok(ratio(counts.values().copied().max().unwrap_or(0), golds.len()))
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotMetrics {
    #[serde(rename = "CA")]
    pub ca: f64,
    #[serde(rename = "JA", skip_serializing_if = "Option::is_none", default)]
    pub ja: Option<f64>,
    #[serde(rename = "OA", skip_serializing_if = "Option::is_none", default)]
    pub oa: Option<f64>,
    pub avg_T: f64,
    pub avg_jump: f64,
    pub reduced: f64,
    #[serde(rename = "macro_F1")]
    pub macro_f1: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(rename = "CA")]
    pub ca: f64,
    #[serde(rename = "JA", skip_serializing_if = "Option::is_none", default)]
    pub ja: Option<f64>,
    #[serde(rename = "OA", skip_serializing_if = "Option::is_none", default)]
    pub oa: Option<f64>,
    pub avg_T: f64,
    pub avg_jump: f64,
    pub reduced: f64,
    #[serde(rename = "macro_F1")]
    pub macro_f1: f64,
    pub per_slot: BTreeMap<String, SlotMetrics>,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

impl SlotMetrics {
    pub fn compute(records: &[EvalRecord], num_classes: usize) -> Result<Self> {
        let rr = reduced_reading(records)?;
        let annotated = records.iter().any(|r| r.gold_jump.is_some());
        let (ja, oa) = if annotated {
            (jumping_accuracy(records).ok(), Some(overall_accuracy(records)?))
        } else {
            (None, None)
        };
        Ok(Self {
            ca: classification_accuracy(records)?,
            ja,
            oa,
            avg_T: rr.avg_sentences,
            avg_jump: rr.avg_jump,
            reduced: rr.reduced,
            macro_f1: macro_f1(records, num_classes)?,
        })
    }
}

impl MetricsReport {
    /// `records[i]` holds every example's record for slot `i`.
    pub fn compute(schema: &SlotSchema, records: &[Vec<EvalRecord>]) -> Result<Self> {
        if records.len() != schema.len() {
            return Err(Error::Shape {
                op: "metrics",
                left: vec![schema.len()],
                right: vec![records.len()],
            });
        }
        let mut per_slot = BTreeMap::new();
        let mut ordered = Vec::with_capacity(records.len());
        for (slot, recs) in schema.slots.iter().zip(records) {
            let m = SlotMetrics::compute(recs, slot.num_actions())?;
            per_slot.insert(slot.name.clone(), m.clone());
            ordered.push(m);
        }
        let opt_mean = |f: fn(&SlotMetrics) -> Option<f64>| {
            let vals: Vec<f64> = ordered.iter().filter_map(f).collect();
            (!vals.is_empty()).then(|| mean(vals.into_iter()))
        };
        Ok(Self {
            ca: mean(ordered.iter().map(|m| m.ca)),
            ja: opt_mean(|m| m.ja),
            oa: opt_mean(|m| m.oa),
            avg_T: mean(ordered.iter().map(|m| m.avg_T)),
            avg_jump: mean(ordered.iter().map(|m| m.avg_jump)),
            reduced: mean(ordered.iter().map(|m| m.reduced)),
            macro_f1: mean(ordered.iter().map(|m| m.macro_f1)),
            per_slot,
        })
    }
}
