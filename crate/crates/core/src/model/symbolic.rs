use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// One slot's symbolic-layer state: a class index in `0..actions`, 0 meaning `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolicState {
    class: usize,
    actions: usize,
}

impl SymbolicState {
    pub fn none(actions: usize) -> Self {
        Self { class: 0, actions }
    }

    pub fn new(class: usize, actions: usize) -> Result<Self> {
        if class >= actions {
            return Err(Error::ActionOutOfRange { action: class, actions });
        }
        Ok(Self { class, actions })
    }

    pub fn class(self) -> usize {
        self.class
    }

    pub fn actions(self) -> usize {
        self.actions
    }

    pub fn is_none(self) -> bool {
        self.class == 0
    }

    pub fn one_hot(self) -> Vec<f64> {
        let mut v = vec![0.0; self.actions];
        v[self.class] = 1.0;
        v
    }
}

/// A state that has left `None` is final; from `None` the state becomes the action.
pub fn symbolic_update(prev: SymbolicState, action: usize) -> Result<SymbolicState> {
    if action >= prev.actions {
        return Err(Error::ActionOutOfRange {
            action,
            actions: prev.actions,
        });
    }
    Ok(if prev.is_none() {
        SymbolicState {
            class: action,
            actions: prev.actions,
        }
    } else {
        prev
    })
}
