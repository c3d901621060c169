//! Extreme learning machine: a single hidden layer with per-neuron
//! activation selection and output weights from a minimal-norm
//! least-squares solve.

mod model;
mod pinv;

pub use model::{activation, hidden_matrix, sigmoid, train, Activation, ElmArchitecture, ElmModel};
pub use pinv::{min_norm_solve, pseudoinverse, PINV_RCOND};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ElmError {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("output weights are not finite")]
    NonFinite,
}
