//! Transient stability prediction: classical-model simulation, feature
//! extraction, extreme learning machines and swarm-based model selection.

// `!(x >= lo)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elm;
pub mod features;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod simkit;
pub mod swarm;
