use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::model_file::TspModel;
use super::PipelineError;
use crate::elm::{train, Activation, ElmArchitecture};
use crate::features::{ClassLabel, KnowledgeBase, SplitIndex, Standardizer};
use crate::metrics::{evaluate, EvaluationReport};
use crate::rng::{stream, Purpose};
use crate::swarm::{CvFitness, OptimizationResult, Optimizer, SwarmConfig};

/// Standardization statistics of the training rows, and those rows
/// standardized.
pub fn standardized_rows(kb: &KnowledgeBase, train: &[usize]) -> Result<(Standardizer, DMatrix<f64>), PipelineError> {
    let stats = Standardizer::fit(kb.samples(), train)?;
    let x = stats.transform(&kb.select_rows(train))?;
    Ok((stats, x))
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub result: OptimizationResult,
    pub model: TspModel,
    /// Whole optimizer run including the final retrain.
    pub total_seconds: f64,
    /// Time spent inside fitness evaluations.
    pub elm_seconds: f64,
    pub train_accuracy: f64,
}

/// Runs `optimizer` on the training rows of `split` and retrains the best
/// decoded network on all of them.
pub fn optimize(
    kb: &KnowledgeBase,
    split: &SplitIndex,
    train_fraction: f64,
    optimizer: Optimizer,
    config: &SwarmConfig,
) -> Result<OptimizeOutcome, PipelineError> {
    config.validate()?;
    let start = Instant::now();
    let (stats, x) = standardized_rows(kb, &split.train)?;
    let labels = kb.select_labels(&split.train);
    let fitness = CvFitness::new(x.clone(), &labels, config.hidden_neurons, config.folds, config.seed)?;
    let result = optimizer.run(&fitness, config)?;
    let elm = fitness.final_model(&result.best_position)?;
    let total_seconds = start.elapsed().as_secs_f64();

    let mut model = TspModel::from_parts(&elm, &stats, kb.feature_names().to_vec());
    model.system = kb.provenance.system.clone();
    model.optimizer = optimizer.to_string();
    model.seed = config.seed;
    model.split_seed = split.seed;
    model.train_fraction = train_fraction;

    let train_report = evaluate("train", &elm, &x, &labels)?;
    Ok(OptimizeOutcome {
        result,
        model,
        total_seconds,
        elm_seconds: fitness.elm_time().as_secs_f64(),
        train_accuracy: train_report.accuracy,
    })
}

/// Reference ELM without model selection: every feature, `hidden`
/// sigmoid neurons, weights and biases uniform on [−1, 1].
pub fn baseline_elm(
    kb: &KnowledgeBase,
    split: &SplitIndex,
    hidden: usize,
    seed: u64,
) -> Result<TspModel, PipelineError> {
    let (stats, x) = standardized_rows(kb, &split.train)?;
    let mut rng = stream(seed, Purpose::Weights, 0, 0);
    let weights = DMatrix::from_fn(hidden, x.ncols(), |_, _| rng.gen_range(-1.0..=1.0));
    let biases = DVector::from_fn(hidden, |_, _| rng.gen_range(-1.0..=1.0));
    let arch = ElmArchitecture::new(weights, biases, vec![Activation::Sigmoid; hidden])?;
    let y: Vec<f64> = kb.select_labels(&split.train).iter().map(|l| l.value()).collect();
    let elm = train(&arch, &x, &y)?;
    let mut model = TspModel::from_parts(&elm, &stats, kb.feature_names().to_vec());
    model.system = kb.provenance.system.clone();
    model.optimizer = "none".into();
    model.seed = seed;
    model.split_seed = split.seed;
    Ok(model)
}

/// Scores `rows` of the raw knowledge base with a persisted model, using
/// the model's own standardization statistics. Prediction time is recorded
/// in the report.
pub fn evaluate_rows(
    name: &str,
    model: &TspModel,
    kb: &KnowledgeBase,
    rows: &[usize],
) -> Result<EvaluationReport, PipelineError> {
    let elm = model.elm()?;
    let start = Instant::now();
    let x = model.standardizer().transform(&kb.select_rows(rows))?;
    let labels: Vec<ClassLabel> = kb.select_labels(rows);
    let report = evaluate(name, &elm, &x, &labels)?;
    let predict_seconds = start.elapsed().as_secs_f64();
    Ok(report.with_times(0.0, predict_seconds))
}
