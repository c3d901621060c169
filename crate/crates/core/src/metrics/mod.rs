//! Confusion matrix, accuracy, Cohen's kappa, ROC AUC and the composite
//! indicator η. The positive class is `Stable`.

mod report;

pub use report::{evaluate, render_csv, render_table, EvaluateError, EvaluationReport};

use serde::{Deserialize, Serialize};

use crate::features::ClassLabel;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("nothing to evaluate")]
    Empty,
    #[error("AUC needs both classes ({positives} positive, {negatives} negative)")]
    SingleClass { positives: usize, negatives: usize },
    #[error("{scores} scores for {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn from_labels(truth: &[ClassLabel], predicted: &[ClassLabel]) -> Result<Self, MetricsError> {
        if truth.len() != predicted.len() {
            return Err(MetricsError::LengthMismatch { scores: predicted.len(), labels: truth.len() });
        }
        let mut cm = Self::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (t, p) {
                (ClassLabel::Stable, ClassLabel::Stable) => cm.tp += 1,
                (ClassLabel::Stable, ClassLabel::Unstable) => cm.fn_ += 1,
                (ClassLabel::Unstable, ClassLabel::Stable) => cm.fp += 1,
                (ClassLabel::Unstable, ClassLabel::Unstable) => cm.tn += 1,
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

/// `(TP + TN) / total`.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64, MetricsError> {
    match cm.total() {
        0 => Err(MetricsError::Empty),
        n => Ok((cm.tp + cm.tn) as f64 / n as f64),
    }
}

/// Cohen's kappa. When chance agreement is 1 (a single class on both sides)
/// the result is 1 for perfect agreement and 0 otherwise.
pub fn kappa(cm: &ConfusionMatrix) -> Result<f64, MetricsError> {
    let p_o = accuracy(cm)?;
    let n = cm.total() as f64;
    let (tp, fn_, fp, tn) = (cm.tp as f64, cm.fn_ as f64, cm.fp as f64, cm.tn as f64);
    let p_e = ((tp + fn_) * (tp + fp) + (tn + fp) * (tn + fn_)) / (n * n);
    if p_e == 1.0 {
        return Ok(if p_o == 1.0 { 1.0 } else { 0.0 });
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Computed from midranks in O(N log N).
pub fn auc(scores: &[f64], labels: &[ClassLabel]) -> Result<f64, MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch { scores: scores.len(), labels: labels.len() });
    }
    let positives = labels.iter().filter(|l| **l == ClassLabel::Stable).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricsError::SingleClass { positives, negatives });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Sum of doubled midranks of the positives keeps everything integral.
    let mut rank_sum2: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank2 = (i + 1 + j + 1) as u64;
        let pos_in_group = order[i..=j].iter().filter(|&&k| labels[k] == ClassLabel::Stable).count() as u64;
        rank_sum2 += midrank2 * pos_in_group;
        i = j + 1;
    }
    let (p, q) = (positives as u64, negatives as u64);
    let u2 = rank_sum2 - p * (p + 1);
    Ok(u2 as f64 / (2 * p * q) as f64)
}

/// `(Acc + Kap + AUC) / 3`, with accuracy as a fraction.
pub fn eta(acc: f64, kap: f64, auc: f64) -> f64 {
    (acc + kap + auc) / 3.0
}
