//! File formats: corpus and schema JSON, rationale gold, pretrained vectors
//! and checkpoints.

mod checkpoint;
mod corpus;
mod embeddings;
mod gold;

pub use checkpoint::{Checkpoint, ParamEntry, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use corpus::{build_vocab, read_corpus, read_schema, to_paragraphs, write_corpus, write_jsonl, CorpusRecord};
pub use embeddings::load_pretrained_embeddings;
pub use gold::{read_rationale_gold, GoldJump};
