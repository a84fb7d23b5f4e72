//! Small dense Q-networks with hand-written backpropagation.
//!
//! Two architectures are supported: a plain fully connected stack and the
//! dueling form, whose trunk feeds separate value and advantage heads that
//! are recombined with a max-subtracting aggregator.

mod matrix;
mod network;
pub mod persist;

use thiserror::Error;

pub use matrix::Matrix;
pub use network::{
    Activation, Batch, Dense, DuelingNet, DuelingOutput, ForwardCache, Gradients, LayerSpec, Mlp, NetworkSpec,
    QNetwork,
};
pub use persist::{load_params, read_params, save_params, write_params, PersistError};

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid architecture: {0}")]
    Architecture(String),
    #[error("expected a {expected} network, got {found}")]
    WrongArchitecture { expected: &'static str, found: &'static str },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Index of the largest entry; ties go to the lowest index. NaN entries are
/// never selected unless every entry is NaN.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if v > values[b] || (values[b].is_nan() && !v.is_nan()) => best = Some(i),
            _ => {}
        }
    }
    best
}
