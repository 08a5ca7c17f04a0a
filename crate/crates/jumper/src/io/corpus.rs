use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use jumper_core::text::{Paragraph, SlotSchema, TextLimits, Vocabulary};
use serde::{Deserialize, Serialize};

use crate::error::{IoError, IoResult};

/// One corpus line: `{"text": …, "labels": {slot: class or null}}`.
/// A missing or null label means `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub text: String,
    #[serde(default)]
    pub labels: BTreeMap<String, Option<String>>,
}

pub(crate) fn open(path: &Path) -> IoResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| IoError::io(path, e))
}

/// Non-blank lines of a JSON-lines file, each with its 1-based line number.
pub(crate) fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> IoResult<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| IoError::format(path, i + 1, e))?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> IoResult<()> {
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| IoError::invalid(path, e))?;
        w.write_all(b"\n").map_err(|e| IoError::io(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

/// Reads a corpus file, returning records with their line numbers.
pub fn read_corpus(path: &Path) -> IoResult<Vec<(usize, CorpusRecord)>> {
    read_jsonl(path)
}

pub fn write_corpus(path: &Path, records: &[CorpusRecord]) -> IoResult<()> {
    write_jsonl(path, records)
}

pub fn read_schema(path: &Path) -> IoResult<SlotSchema> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let schema: SlotSchema = serde_json::from_str(&text).map_err(|e| IoError::format(path, e.line(), e))?;
    schema.validate().map_err(|e| IoError::invalid(path, e))?;
    Ok(schema)
}

pub fn build_vocab(records: &[(usize, CorpusRecord)], min_count: usize) -> Vocabulary {
    Vocabulary::build(records.iter().map(|(_, r)| r.text.as_str()), min_count)
}

/// Converts records into paragraphs. Unknown slots or classes are errors that
/// name the offending line.
pub fn to_paragraphs(
    path: &Path,
    records: &[(usize, CorpusRecord)],
    schema: &SlotSchema,
    vocab: &Vocabulary,
    limits: &TextLimits,
) -> IoResult<Vec<Paragraph>> {
    records
        .iter()
        .map(|(line, r)| {
            if let Some(name) = r.labels.keys().find(|k| schema.slot_index(k).is_none()) {
                let valid: Vec<&str> = schema.slots.iter().map(|s| s.name.as_str()).collect();
                return Err(IoError::format(
                    path,
                    *line,
                    format!("unknown slot `{name}` (schema has {valid:?})"),
                ));
            }
            let labels = schema
                .slots
                .iter()
                .map(|s| s.class_index(r.labels.get(&s.name).and_then(|l| l.as_deref())))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| IoError::format(path, *line, e))?;
            Paragraph::from_text(&r.text, vocab, labels, limits).map_err(|e| IoError::format(path, *line, e))
        })
        .collect()
}
