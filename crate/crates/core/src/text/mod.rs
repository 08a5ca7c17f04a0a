//! Corpus preparation: sub-sentence segmentation, tokenization, vocabulary,
//! embedding tables, slot schemas and dataset splits.

mod embedding;
mod schema;
mod segment;
mod split;
mod vocab;

pub use embedding::EmbeddingTable;
pub use schema::{Paragraph, Slot, SlotSchema, TextLimits, NONE_CLASS};
pub use segment::{segment_paragraph, tokenize, DELIMITERS};
pub use split::{split_dataset, DatasetSplit, SplitScheme};
pub use vocab::{Vocabulary, PAD, PAD_TOKEN, UNK, UNK_TOKEN};
