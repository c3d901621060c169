use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::elm::{Activation, ElmArchitecture, ElmModel};
use crate::features::{ClassLabel, Standardizer};

/// Everything needed to score a raw feature vector: standardization
/// statistics, feature mask and network weights. Stored as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspModel {
    pub system: String,
    pub optimizer: String,
    pub seed: u64,
    pub split_seed: u64,
    pub train_fraction: f64,
    pub feature_names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub feature_mask: Vec<bool>,
    pub hidden: usize,
    pub inputs: usize,
    /// One row per hidden neuron over the masked-in features.
    pub input_weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub activations: Vec<u8>,
    pub output_weights: Vec<f64>,
}

impl TspModel {
    pub fn from_parts(elm: &ElmModel, stats: &Standardizer, feature_names: Vec<String>) -> Self {
        let arch = &elm.architecture;
        Self {
            system: String::new(),
            optimizer: String::new(),
            seed: 0,
            split_seed: 0,
            train_fraction: 0.0,
            feature_names,
            mean: stats.mean.clone(),
            std: stats.std.clone(),
            feature_mask: elm.feature_mask.clone(),
            hidden: arch.hidden(),
            inputs: arch.input_dim(),
            input_weights: arch.input_weights().row_iter().map(|r| r.iter().copied().collect()).collect(),
            biases: arch.biases().iter().copied().collect(),
            activations: arch.activations().iter().map(|a| a.code()).collect(),
            output_weights: elm.output_weights.iter().copied().collect(),
        }
    }

    pub fn standardizer(&self) -> Standardizer {
        Standardizer { mean: self.mean.clone(), std: self.std.clone() }
    }

    pub fn effective_hidden(&self) -> usize {
        self.activations.iter().filter(|c| **c != 0).count()
    }

    /// Rebuilds the network, checking every dimension.
    pub fn elm(&self) -> Result<ElmModel, PipelineError> {
        let bad = |m: String| PipelineError::ModelFile(m);
        let width = self.feature_mask.len();
        if self.mean.len() != width || self.std.len() != width || self.feature_names.len() != width {
            return Err(bad(format!("feature mask has {width} entries but statistics or names differ")));
        }
        if self.feature_mask.iter().filter(|m| **m).count() != self.inputs {
            return Err(bad(format!("mask selects a different number of features than inputs = {}", self.inputs)));
        }
        if self.input_weights.len() != self.hidden
            || self.input_weights.iter().any(|r| r.len() != self.inputs)
            || self.biases.len() != self.hidden
            || self.activations.len() != self.hidden
            || self.output_weights.len() != self.hidden
        {
            return Err(bad(format!("weights inconsistent with hidden = {}, inputs = {}", self.hidden, self.inputs)));
        }
        let weights = DMatrix::from_fn(self.hidden, self.inputs, |i, j| self.input_weights[i][j]);
        let activations = self
            .activations
            .iter()
            .map(|c| Activation::from_code(*c))
            .collect::<Result<Vec<_>, _>>()?;
        let arch = ElmArchitecture::new(weights, DVector::from_vec(self.biases.clone()), activations)?;
        let beta = DVector::from_vec(self.output_weights.clone());
        if beta.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite output weight".into()));
        }
        Ok(ElmModel { architecture: arch, output_weights: beta, feature_mask: self.feature_mask.clone() })
    }

    pub fn predictor(&self) -> Result<Predictor, PipelineError> {
        Ok(Predictor { elm: self.elm()?, stats: self.standardizer() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let model: Self = serde_json::from_str(text).map_err(|e| PipelineError::ModelFile(e.to_string()))?;
        model.elm()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        std::fs::write(path, self.to_json()).map_err(|e| PipelineError::Io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }
}

/// A loaded model ready to score raw (unstandardized) feature vectors.
#[derive(Debug, Clone)]
pub struct Predictor {
    elm: ElmModel,
    stats: Standardizer,
}

impl Predictor {
    pub fn dimension(&self) -> usize {
        self.stats.dimension()
    }

    pub fn score(&self, raw: &[f64]) -> Result<f64, PipelineError> {
        let z = self.stats.transform_row(raw)?;
        let x: Vec<f64> = z.iter().zip(&self.elm.feature_mask).filter(|(_, m)| **m).map(|(v, _)| *v).collect();
        Ok(self.elm.predict_score(&x)?)
    }

    pub fn predict(&self, raw: &[f64]) -> Result<(ClassLabel, f64), PipelineError> {
        let s = self.score(raw)?;
        Ok((ClassLabel::from_score(s), s))
    }
}
