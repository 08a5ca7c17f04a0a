use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    Shape {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("non-finite gradient in parameter `{0}`")]
    NonFiniteGradient(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("action {action} out of range for a slot with {actions} actions")]
    ActionOutOfRange { action: usize, actions: usize },
    #[error("step {t} out of range 1..={max}")]
    StepOutOfRange { t: usize, max: usize },
    #[error(
        "jump at the first sentence has no previous encoding; use the first-sentence rule \
         (`rationale::top_d_dims_first_sentence`)"
    )]
    FirstSentenceJump,
    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),
    #[error("cannot split {n} samples into {k} folds")]
    TooManyFolds { k: usize, n: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Invalid(String),
}
