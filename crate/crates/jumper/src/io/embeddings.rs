use std::io::BufRead;
use std::path::Path;

use jumper_core::text::{EmbeddingTable, Vocabulary};
use rand::Rng;

use super::corpus::open;
use crate::error::{IoError, IoResult};

/// Reads whitespace-separated `token v1 … vd` lines. Vocabulary rows found in
/// the file are copied; the rest are drawn from uniform[-0.01, 0.01]. Every
/// line must have the same `d`, and `d` must equal `dim` when given.
pub fn load_pretrained_embeddings<R: Rng + ?Sized>(
    path: &Path,
    vocab: &Vocabulary,
    dim: Option<usize>,
    rng: &mut R,
) -> IoResult<EmbeddingTable> {
    let mut d = dim;
    let mut found: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        let mut parts = line.split_whitespace();
        let Some(token) = parts.next() else { continue };
        let values = parts
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IoError::format(path, i + 1, e))?;
        match d {
            None => d = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(IoError::format(
                    path,
                    i + 1,
                    format!("expected {d} values, found {}", values.len()),
                ))
            }
            Some(_) => {}
        }
        if vocab.contains(token) {
            found.push((token.to_string(), values));
        }
    }
    let d = d.ok_or_else(|| IoError::invalid(path, "no vectors"))?;
    if d == 0 {
        return Err(IoError::invalid(path, "vectors have no values"));
    }
    EmbeddingTable::assemble(vocab, d, found.iter().map(|(t, v)| (t.as_str(), v.as_slice())), rng)
        .map_err(|e| IoError::invalid(path, e))
}
