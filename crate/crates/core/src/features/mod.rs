//! Stability labels, measurement-window features, standardization and
//! train/test partitioning of the knowledge base.

mod extract;
mod kb;
mod label;
mod split;
mod standardize;

pub use extract::{extract_features, feature_dimension, feature_names, window_indices, SAMPLING_RATE, WINDOW_SAMPLES};
pub use kb::{metadata_path, read_csv, KbMetadata, KnowledgeBase, Provenance};
pub use label::{label_from_separation, label_trajectory, max_angle_separation, ClassLabel, INSTABILITY_ANGLE};
pub use split::{kfold_partition, split_train_test, SplitIndex};
pub use standardize::{Standardizer, CONSTANT_FEATURE_STD};

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("measurement window needs data up to t = {needed} s, trajectory ends at {available} s")]
    WindowOutOfRange { needed: f64, available: f64 },
    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("{0}")]
    Domain(String),
    #[error("knowledge base has a single class ({stable} stable, {unstable} unstable)")]
    SingleClass { stable: usize, unstable: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot access {0}: {1}")]
    Io(String, #[source] std::io::Error),
}
