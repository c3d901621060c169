use rayon::prelude::*;

use super::PipelineError;
use crate::features::{
    extract_features, feature_names, label_trajectory, split_train_test, ClassLabel, KbMetadata, KnowledgeBase,
    Provenance,
};
use crate::simkit::{build_scenario_grid, simulate_trajectory, PowerSystemModel, ScenarioGridSpec, SimulationScenario};

/// Simulates one scenario and returns its feature vector and label.
pub fn simulate_sample(
    model: &PowerSystemModel,
    scenario: &SimulationScenario,
) -> Result<(Vec<f64>, ClassLabel), PipelineError> {
    let trajectory = simulate_trajectory(model, scenario)?;
    Ok((extract_features(&trajectory)?, label_trajectory(&trajectory)?))
}

/// Simulates every scenario of `grid` (in parallel, results in grid order)
/// and assembles the knowledge base with its sidecar metadata. The
/// sidecar's standardization statistics come from the training rows of the
/// split given by `split_seed` and `train_fraction`.
pub fn generate_knowledge_base(
    model: &PowerSystemModel,
    grid: &ScenarioGridSpec,
    split_seed: u64,
    train_fraction: f64,
) -> Result<(KnowledgeBase, KbMetadata), PipelineError> {
    let scenarios = build_scenario_grid(grid, model.base_frequency, grid.seed)?;
    let samples: Vec<(Vec<f64>, ClassLabel)> = scenarios
        .par_iter()
        .map(|s| simulate_sample(model, s))
        .collect::<Result<_, _>>()?;

    let names = feature_names(model.generator_count());
    let n = names.len();
    let values: Vec<f64> = samples.iter().flat_map(|(x, _)| x.iter().copied()).collect();
    let labels: Vec<ClassLabel> = samples.iter().map(|(_, l)| *l).collect();
    let x = nalgebra::DMatrix::from_row_slice(labels.len(), n, &values);
    let provenance = Provenance { system: model.name.clone(), seed: grid.seed, grid: Some(grid.clone()) };
    let kb = KnowledgeBase::new(x, labels, names, provenance)?;

    let split = split_train_test(kb.labels(), train_fraction, split_seed)?;
    let (_, stats, constant) = kb.standardize(&split.train)?;
    let (stable, unstable) = kb.class_counts();
    let meta = KbMetadata {
        system: model.name.clone(),
        seed: grid.seed,
        split_seed,
        train_fraction,
        samples: kb.len(),
        stable,
        unstable,
        feature_names: kb.feature_names().to_vec(),
        mean: stats.mean,
        std: stats.std,
        constant_features: constant,
        grid: Some(grid.clone()),
    };
    Ok((kb, meta))
}
