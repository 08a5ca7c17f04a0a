//! Differentiable numeric kernels with hand-written backward passes, the
//! parameter and gradient stores, AdaDelta, and a finite-difference checker.

mod adadelta;
mod gradcheck;
mod gru;
mod ops;
mod tensor;

pub use adadelta::{AdaDeltaConfig, AdaDeltaState};
pub use gradcheck::{grad_check, GradCheckOptions};
pub use gru::{gru_step, gru_step_backward, GruBackward, GruCache, GruView, GRU_PARAM_SUFFIXES};
pub use ops::{
    affine, affine_backward, affine_backward_into, affine_forward_into, apply_mask, dropout_mask,
    max_pool_argmax, max_pool_backward, neg_log_prob_logit_grad, relu, softmax, softmax_backward,
    softmax_slice,
};
pub use tensor::{GradBuf, GradStore, ParamStore, Tensor, INIT_RANGE};
