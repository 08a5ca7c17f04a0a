//! Core of the jumper text classifier.
//!
//! A paragraph is read one sub-sentence at a time. Each sentence is encoded by
//! a CNN with max pooling, a GRU controller fuses the sentence history, and a
//! per-slot policy head decides whether to stay at the default class `None` or
//! jump to a concrete class. A symbolic layer makes every jump final. The
//! policy is trained with REINFORCE on shaped rewards, and word-level
//! rationales are recovered by backtracking through the max-pooling argmax.
//!
//! This crate is `no_std` (it needs `alloc`). File formats, checkpoints and
//! the command-line tool live in the `jumper` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
pub mod math;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod rationale;
pub mod rl;
pub mod synthetic;
pub mod text;

pub use error::{Error, Result};
pub use model::{EncoderConfig, EpisodeTrace, Jumper, ModelConfig, SymbolicState};
pub use nn::{AdaDeltaState, GradStore, ParamStore, Tensor};
pub use text::{Paragraph, SlotSchema, Vocabulary};
