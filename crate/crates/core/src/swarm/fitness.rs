use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use super::encoding::{decode_particle, DecodedParticle, EncodingSpec};
use super::SwarmError;
use crate::elm::{hidden_matrix, min_norm_solve, train, ElmModel};
use crate::features::{kfold_partition, ClassLabel};

/// Objective maximized by the optimizers. Evaluations must be pure
/// functions of the position so that parallel scheduling cannot change
/// results.
pub trait Fitness: Sync {
    fn dimension(&self) -> usize;
    fn evaluate(&self, position: &[f64]) -> f64;
}

/// Wraps a closure as a fitness function.
pub struct FnFitness<F> {
    dimension: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnFitness<F> {
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Fitness for FnFitness<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, position: &[f64]) -> f64 {
        (self.f)(position)
    }
}

/// k-fold cross-validation accuracy of the ELM a position decodes to.
/// The folds are fixed at construction.
pub struct CvFitness {
    x: DMatrix<f64>,
    y: Vec<f64>,
    folds: Vec<Vec<usize>>,
    /// For each fold, the rows outside it.
    complements: Vec<Vec<usize>>,
    spec: EncodingSpec,
    elm_nanos: AtomicU64,
}

impl CvFitness {
    /// `x` holds the (standardized) training rows only.
    pub fn new(
        x: DMatrix<f64>,
        labels: &[ClassLabel],
        hidden: usize,
        folds: usize,
        fold_seed: u64,
    ) -> Result<Self, SwarmError> {
        if x.nrows() != labels.len() {
            return Err(SwarmError::Domain(format!("{} rows but {} labels", x.nrows(), labels.len())));
        }
        let spec = EncodingSpec::new(x.ncols(), hidden)?;
        let folds = kfold_partition(labels, folds, fold_seed)?;
        let complements = folds
            .iter()
            .map(|f| {
                let mut inside = vec![false; labels.len()];
                f.iter().for_each(|&i| inside[i] = true);
                (0..labels.len()).filter(|&i| !inside[i]).collect()
            })
            .collect();
        let y = labels.iter().map(|l| l.value()).collect();
        Ok(Self { x, y, folds, complements, spec, elm_nanos: AtomicU64::new(0) })
    }

    pub fn spec(&self) -> EncodingSpec {
        self.spec
    }

    pub fn folds(&self) -> &[Vec<usize>] {
        &self.folds
    }

    /// Time spent in hidden-layer and output-weight computations so far.
    pub fn elm_time(&self) -> Duration {
        Duration::from_nanos(self.elm_nanos.load(Ordering::Relaxed))
    }

    fn masked(&self, decoded: &DecodedParticle) -> DMatrix<f64> {
        self.x.select_columns(&decoded.selected())
    }

    /// Correctly classified held-out rows over all folds, divided by N.
    pub fn cross_validate(&self, decoded: &DecodedParticle) -> Result<f64, SwarmError> {
        let h = hidden_matrix(&decoded.architecture, &self.masked(decoded)).map_err(|e| SwarmError::Domain(e.to_string()))?;
        let active: Vec<usize> = (0..h.ncols()).filter(|&j| h.column(j).iter().any(|v| *v != 0.0)).collect();
        let h = h.select_columns(&active);
        let mut correct = 0usize;
        for (fold, rest) in self.folds.iter().zip(&self.complements) {
            let y_train = DVector::from_iterator(rest.len(), rest.iter().map(|&i| self.y[i]));
            let beta = min_norm_solve(&h.select_rows(rest), &y_train);
            let scores = h.select_rows(fold) * beta;
            correct += fold
                .iter()
                .zip(scores.iter())
                .filter(|(&i, s)| ClassLabel::from_score(**s).value() == self.y[i])
                .count();
        }
        Ok(correct as f64 / self.y.len() as f64)
    }

    /// Decodes `position` and trains on every training row.
    pub fn final_model(&self, position: &[f64]) -> Result<ElmModel, SwarmError> {
        let decoded = decode_particle(position, &self.spec)?;
        let model = train(&decoded.architecture, &self.masked(&decoded), &self.y).map_err(|e| SwarmError::Domain(e.to_string()))?;
        Ok(model.with_mask(decoded.mask))
    }
}

impl Fitness for CvFitness {
    fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    fn evaluate(&self, position: &[f64]) -> f64 {
        let start = Instant::now();
        let result = decode_particle(position, &self.spec).and_then(|d| self.cross_validate(&d));
        self.elm_nanos.fetch_add(start.elapsed().as_nanos() as u64, Ordering::Relaxed);
        match result {
            Ok(f) => f,
            Err(e) => {
                log::warn!("fitness evaluation failed, scoring 0: {e}");
                0.0
            }
        }
    }
}
