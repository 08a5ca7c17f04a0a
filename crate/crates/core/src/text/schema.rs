use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{segment_paragraph, tokenize, Vocabulary};
use crate::{Error, Result};

/// Display name of the default class, which always has index 0.
pub const NONE_CLASS: &str = "None";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub classes: Vec<String>,
}

impl Slot {
    /// Size of the action space: the classes plus `None`.
    pub fn num_actions(&self) -> usize {
        self.classes.len() + 1
    }

    /// Class index of a label; `None` (absent label) maps to 0.
    pub fn class_index(&self, label: Option<&str>) -> Result<usize> {
        match label {
            None => Ok(0),
            Some(l) => self
                .classes
                .iter()
                .position(|c| c == l)
                .map(|i| i + 1)
                .ok_or_else(|| Error::Invalid(format!("unknown class `{l}` for slot `{}`", self.name))),
        }
    }

    /// Class name for an index, `None` for index 0.
    pub fn class_name(&self, index: usize) -> Option<&str> {
        index.checked_sub(1).and_then(|i| self.classes.get(i)).map(String::as_str)
    }

    /// Class name for an index, with index 0 rendered as `"None"`.
    pub fn display_name(&self, index: usize) -> &str {
        self.class_name(index).unwrap_or(NONE_CLASS)
    }
}

/// Ordered slots; each slot's action 0 is `None` and actions `1..=N_i` are its classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSchema {
    pub slots: Vec<Slot>,
}

impl SlotSchema {
    pub fn new(slots: Vec<Slot>) -> Result<Self> {
        let s = Self { slots };
        s.validate()?;
        Ok(s)
    }

    /// One slot named `name` with the given classes.
    pub fn single(name: &str, classes: &[&str]) -> Result<Self> {
        Self::new(alloc::vec![Slot {
            name: name.into(),
            classes: classes.iter().map(|c| String::from(*c)).collect(),
        }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots.is_empty() {
            return Err(Error::Invalid("schema has no slots".into()));
        }
        let mut names = BTreeSet::new();
        for slot in &self.slots {
            if !names.insert(slot.name.as_str()) {
                return Err(Error::Invalid(format!("duplicate slot name `{}`", slot.name)));
            }
            if slot.classes.is_empty() {
                return Err(Error::Invalid(format!("slot `{}` has no classes", slot.name)));
            }
            let mut seen = BTreeSet::new();
            for c in &slot.classes {
                if !seen.insert(c.as_str()) {
                    return Err(Error::Invalid(format!("duplicate class `{c}` in slot `{}`", slot.name)));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }

    /// `N_i + 1` for every slot.
    pub fn action_counts(&self) -> Vec<usize> {
        self.slots.iter().map(Slot::num_actions).collect()
    }
}

/// Length limits applied when turning text into a [`Paragraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TextLimits {
    pub max_tokens_per_sentence: usize,
    pub max_sentences: usize,
}

impl Default for TextLimits {
    fn default() -> Self {
        Self {
            max_tokens_per_sentence: 60,
            max_sentences: 30,
        }
    }
}

/// A paragraph as the model reads it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub sentences: Vec<Vec<usize>>,
    pub raw_sentences: Vec<String>,
    /// Gold class index per slot (0 = `None`).
    pub labels: Vec<usize>,
}

impl Paragraph {
    /// Segments, tokenizes and encodes `text`, truncating over-long input.
    pub fn from_text(text: &str, vocab: &Vocabulary, labels: Vec<usize>, limits: &TextLimits) -> Result<Self> {
        let mut raw = segment_paragraph(text)?;
        if raw.len() > limits.max_sentences {
            log::warn!(
                "paragraph has {} sentences; keeping the first {}",
                raw.len(),
                limits.max_sentences
            );
            raw.truncate(limits.max_sentences);
        }
        let sentences = raw
            .iter()
            .map(|s| {
                let mut toks = tokenize(s);
                if toks.len() > limits.max_tokens_per_sentence {
                    log::warn!(
                        "sentence has {} tokens; keeping the first {}",
                        toks.len(),
                        limits.max_tokens_per_sentence
                    );
                    toks.truncate(limits.max_tokens_per_sentence);
                }
                vocab.encode(&toks)
            })
            .collect();
        let p = Self {
            sentences,
            raw_sentences: raw,
            labels,
        };
        p.validate(vocab.len())?;
        Ok(p)
    }

    pub fn validate(&self, vocab_len: usize) -> Result<()> {
        if self.sentences.is_empty() {
            return Err(Error::EmptyInput("paragraph has no sentences"));
        }
        if self.sentences.len() != self.raw_sentences.len() {
            return Err(Error::Invalid("raw and tokenized sentence counts differ".into()));
        }
        if self.sentences.iter().flatten().any(|&t| t >= vocab_len) {
            return Err(Error::Invalid("token id outside the vocabulary".into()));
        }
        Ok(())
    }

    pub fn num_sentences(&self) -> usize {
        self.sentences.len()
    }
}
