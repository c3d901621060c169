//! End-to-end stages: knowledge-base generation, model selection,
//! evaluation and optimizer comparison.

mod compare;
mod generate;
mod model_file;
mod optimize;

pub use compare::{compare_optimizers, render_compare_csv, render_compare_table, CompareRow, CompareRun};
pub use generate::{generate_knowledge_base, simulate_sample};
pub use model_file::{Predictor, TspModel};
pub use optimize::{baseline_elm, evaluate_rows, optimize, standardized_rows, OptimizeOutcome};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Sim(#[from] crate::simkit::SimError),
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
    #[error(transparent)]
    Swarm(#[from] crate::swarm::SwarmError),
    #[error(transparent)]
    Elm(#[from] crate::elm::ElmError),
    #[error(transparent)]
    Evaluate(#[from] crate::metrics::EvaluateError),
    #[error("invalid model file: {0}")]
    ModelFile(String),
    #[error("cannot access {0}: {1}")]
    Io(String, #[source] std::io::Error),
}
