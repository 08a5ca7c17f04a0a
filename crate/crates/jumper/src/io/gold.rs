use std::path::Path;

use jumper_core::text::SlotSchema;
use serde::{Deserialize, Serialize};

use super::corpus::read_jsonl;
use crate::error::{IoError, IoResult};

/// One rationale annotation: example `id` (0-based line order of the data
/// file), slot name and the 0-based index of the key sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldJump {
    pub id: usize,
    pub slot: String,
    pub gold_jump: usize,
}

/// Gold jump steps indexed `[example][slot]`, converted to 1-based steps.
pub fn read_rationale_gold(path: &Path, schema: &SlotSchema, examples: usize) -> IoResult<Vec<Vec<Option<usize>>>> {
    let mut out = vec![vec![None; schema.len()]; examples];
    for (line, g) in read_jsonl::<GoldJump>(path)? {
        let slot = schema
            .slot_index(&g.slot)
            .ok_or_else(|| IoError::format(path, line, format!("unknown slot `{}`", g.slot)))?;
        if g.id >= examples {
            return Err(IoError::format(
                path,
                line,
                format!("id {} but the data has {examples} examples", g.id),
            ));
        }
        out[g.id][slot] = Some(g.gold_jump + 1);
    }
    Ok(out)
}
