use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::FeatureError;

/// Columns whose standard deviation falls below this are mapped to zero.
pub const CONSTANT_FEATURE_STD: f64 = 1e-12;

/// Per-feature z-score statistics, `z' = (z − mean) / std`, with the sample
/// standard deviation (divisor N − 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Statistics of `rows` of `x` (column-wise).
    pub fn fit(x: &DMatrix<f64>, rows: &[usize]) -> Result<Self, FeatureError> {
        if rows.len() < 2 {
            return Err(FeatureError::TooFewSamples(format!(
                "standardization needs at least 2 rows, got {}",
                rows.len()
            )));
        }
        let n = rows.len() as f64;
        let mut mean = Vec::with_capacity(x.ncols());
        let mut std = Vec::with_capacity(x.ncols());
        for j in 0..x.ncols() {
            let m = rows.iter().map(|&i| x[(i, j)]).sum::<f64>() / n;
            let var = rows.iter().map(|&i| (x[(i, j)] - m).powi(2)).sum::<f64>() / (n - 1.0);
            mean.push(m);
            std.push(var.sqrt());
        }
        Ok(Self { mean, std })
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn is_constant(&self, feature: usize) -> bool {
        !(self.std[feature] >= CONSTANT_FEATURE_STD)
    }

    pub fn constant_features(&self) -> Vec<usize> {
        (0..self.dimension()).filter(|&j| self.is_constant(j)).collect()
    }

    pub fn transform_value(&self, feature: usize, value: f64) -> f64 {
        if self.is_constant(feature) {
            0.0
        } else {
            (value - self.mean[feature]) / self.std[feature]
        }
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if row.len() != self.dimension() {
            return Err(FeatureError::DimensionMismatch { expected: self.dimension(), found: row.len() });
        }
        Ok(row.iter().enumerate().map(|(j, &v)| self.transform_value(j, v)).collect())
    }

    pub fn transform(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, FeatureError> {
        if x.ncols() != self.dimension() {
            return Err(FeatureError::DimensionMismatch { expected: self.dimension(), found: x.ncols() });
        }
        Ok(DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| self.transform_value(j, x[(i, j)])))
    }

    /// Undoes [`transform_row`](Self::transform_row); constant columns come
    /// back as their mean.
    pub fn inverse_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| if self.is_constant(j) { self.mean[j] } else { v * self.std[j] + self.mean[j] })
            .collect()
    }
}
