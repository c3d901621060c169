use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::pinv::min_norm_solve;
use super::ElmError;
use crate::features::ClassLabel;

/// Hidden-neuron transfer function selected by the integer code `cf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Activation {
    /// `cf = 0`: the neuron is switched off.
    Off,
    /// `cf = 1`: logistic sigmoid.
    Sigmoid,
    /// `cf = 2`: identity.
    Linear,
}

impl Activation {
    pub fn from_code(code: u8) -> Result<Self, ElmError> {
        match code {
            0 => Ok(Activation::Off),
            1 => Ok(Activation::Sigmoid),
            2 => Ok(Activation::Linear),
            c => Err(ElmError::InvalidArchitecture(format!("activation code {c} not in {{0, 1, 2}}"))),
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Activation::Off => 0,
            Activation::Sigmoid => 1,
            Activation::Linear => 2,
        }
    }

    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Off => 0.0,
            Activation::Sigmoid => sigmoid(v),
            Activation::Linear => v,
        }
    }
}

/// Logistic function evaluated without overflow for large |v|.
#[inline]
pub fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// Scalar activation by code.
pub fn activation(code: u8, v: f64) -> Result<f64, ElmError> {
    Activation::from_code(code).map(|a| a.apply(v))
}

/// Hidden layer: input weights `a` (L×n), biases `b` (L) and one activation
/// per neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmArchitecture {
    input_weights: DMatrix<f64>,
    biases: DVector<f64>,
    activations: Vec<Activation>,
}

impl ElmArchitecture {
    pub fn new(input_weights: DMatrix<f64>, biases: DVector<f64>, activations: Vec<Activation>) -> Result<Self, ElmError> {
        let l = input_weights.nrows();
        if biases.len() != l || activations.len() != l {
            return Err(ElmError::InvalidArchitecture(format!(
                "{l} weight rows, {} biases, {} activations",
                biases.len(),
                activations.len()
            )));
        }
        if activations.iter().all(|a| *a == Activation::Off) {
            return Err(ElmError::InvalidArchitecture("every neuron is switched off".into()));
        }
        if input_weights.iter().chain(biases.iter()).any(|v| !v.is_finite()) {
            return Err(ElmError::InvalidArchitecture("non-finite weight".into()));
        }
        Ok(Self { input_weights, biases, activations })
    }

    pub fn input_dim(&self) -> usize {
        self.input_weights.ncols()
    }

    pub fn hidden(&self) -> usize {
        self.input_weights.nrows()
    }

    /// Neurons whose activation is not `Off`.
    pub fn effective_hidden(&self) -> usize {
        self.activations.iter().filter(|a| **a != Activation::Off).count()
    }

    pub fn input_weights(&self) -> &DMatrix<f64> {
        &self.input_weights
    }

    pub fn biases(&self) -> &DVector<f64> {
        &self.biases
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    fn active(&self) -> Vec<usize> {
        (0..self.hidden()).filter(|&j| self.activations[j] != Activation::Off).collect()
    }

    fn check_input(&self, cols: usize) -> Result<(), ElmError> {
        if cols != self.input_dim() {
            return Err(ElmError::ShapeMismatch { expected: self.input_dim(), found: cols });
        }
        Ok(())
    }

    /// Hidden outputs for the neurons in `neurons` only (N × |neurons|).
    fn hidden_columns(&self, x: &DMatrix<f64>, neurons: &[usize]) -> DMatrix<f64> {
        let a = DMatrix::from_fn(neurons.len(), self.input_dim(), |r, c| self.input_weights[(neurons[r], c)]);
        let mut h = x * a.transpose();
        for (c, &j) in neurons.iter().enumerate() {
            let (act, b) = (self.activations[j], self.biases[j]);
            for v in h.column_mut(c).iter_mut() {
                *v = act.apply(*v + b);
            }
        }
        h
    }
}

/// Hidden layer output matrix H (N×L): `H[i][j] = f_j(a_j · x_i + b_j)`.
/// Columns of switched-off neurons are zero.
pub fn hidden_matrix(arch: &ElmArchitecture, x: &DMatrix<f64>) -> Result<DMatrix<f64>, ElmError> {
    arch.check_input(x.ncols())?;
    let all: Vec<usize> = (0..arch.hidden()).collect();
    Ok(arch.hidden_columns(x, &all))
}

/// A trained single-output network. The feature mask records which
/// columns of the full feature vector feed the input layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    pub architecture: ElmArchitecture,
    pub output_weights: DVector<f64>,
    pub feature_mask: Vec<bool>,
}

/// Output weights `β = H† y` for ±1 targets.
///
/// Switched-off neurons contribute zero columns to H; they are left out of
/// the solve and receive β = 0, which is what the minimal-norm solution
/// assigns them.
pub fn train(arch: &ElmArchitecture, x: &DMatrix<f64>, y: &[f64]) -> Result<ElmModel, ElmError> {
    arch.check_input(x.ncols())?;
    if y.len() != x.nrows() {
        return Err(ElmError::ShapeMismatch { expected: x.nrows(), found: y.len() });
    }
    let active = arch.active();
    let h = arch.hidden_columns(x, &active);
    let beta_active = min_norm_solve(&h, &DVector::from_column_slice(y));
    let mut beta = DVector::zeros(arch.hidden());
    for (k, &j) in active.iter().enumerate() {
        beta[j] = beta_active[k];
    }
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(ElmError::NonFinite);
    }
    Ok(ElmModel { architecture: arch.clone(), output_weights: beta, feature_mask: vec![true; arch.input_dim()] })
}

impl ElmModel {
    pub fn with_mask(mut self, mask: Vec<bool>) -> Self {
        self.feature_mask = mask;
        self
    }

    /// Decision score `Σ β_j f_j(a_j · x + b_j)`.
    pub fn predict_score(&self, x: &[f64]) -> Result<f64, ElmError> {
        let arch = &self.architecture;
        arch.check_input(x.len())?;
        let mut score = 0.0;
        for j in 0..arch.hidden() {
            let act = arch.activations[j];
            if act == Activation::Off {
                continue;
            }
            let v = arch.input_weights.row(j).iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + arch.biases[j];
            score += self.output_weights[j] * act.apply(v);
        }
        Ok(score)
    }

    /// Scores of every row of `x`.
    pub fn predict_scores(&self, x: &DMatrix<f64>) -> Result<Vec<f64>, ElmError> {
        self.architecture.check_input(x.ncols())?;
        let active = self.architecture.active();
        let h = self.architecture.hidden_columns(x, &active);
        let beta = DVector::from_fn(active.len(), |k, _| self.output_weights[active[k]]);
        Ok((h * beta).iter().copied().collect())
    }

    /// `+1` when the score is ≥ 0, `−1` otherwise.
    pub fn predict_label(&self, x: &[f64]) -> Result<ClassLabel, ElmError> {
        self.predict_score(x).map(ClassLabel::from_score)
    }
}
