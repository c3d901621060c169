use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{accuracy, auc, eta, kappa, ConfusionMatrix, MetricsError};
use crate::elm::{ElmError, ElmModel};
use crate::features::ClassLabel;

/// Test-set figures for one model. `auc` and `eta` are absent when the
/// evaluated rows hold a single class; a warning says so.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model: String,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub kappa: f64,
    pub auc: Option<f64>,
    pub eta: Option<f64>,
    pub train_seconds: f64,
    pub predict_seconds: f64,
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    pub fn from_scores(model: &str, labels: &[ClassLabel], scores: &[f64]) -> Result<Self, MetricsError> {
        let predicted: Vec<ClassLabel> = scores.iter().map(|s| ClassLabel::from_score(*s)).collect();
        let confusion = ConfusionMatrix::from_labels(labels, &predicted)?;
        let acc = accuracy(&confusion)?;
        let kap = kappa(&confusion)?;
        let mut warnings = Vec::new();
        let auc = match auc(scores, labels) {
            Ok(a) => Some(a),
            Err(e @ MetricsError::SingleClass { .. }) => {
                warnings.push(format!("{e}; AUC and eta undefined"));
                None
            }
            Err(e) => return Err(e),
        };
        Ok(Self {
            model: model.to_string(),
            confusion,
            accuracy: acc,
            kappa: kap,
            auc,
            eta: auc.map(|a| eta(acc, kap, a)),
            train_seconds: 0.0,
            predict_seconds: 0.0,
            warnings,
        })
    }

    pub fn with_times(mut self, train_seconds: f64, predict_seconds: f64) -> Self {
        self.train_seconds = train_seconds;
        self.predict_seconds = predict_seconds;
        self
    }
}

/// Scores the rows of `x` (full feature width; the model's mask is applied
/// here) and assembles the report.
pub fn evaluate(name: &str, model: &ElmModel, x: &DMatrix<f64>, labels: &[ClassLabel]) -> Result<EvaluationReport, EvaluateError> {
    if x.ncols() != model.feature_mask.len() {
        return Err(ElmError::ShapeMismatch { expected: model.feature_mask.len(), found: x.ncols() }.into());
    }
    let selected: Vec<usize> = (0..x.ncols()).filter(|&j| model.feature_mask[j]).collect();
    let scores = model.predict_scores(&x.select_columns(&selected))?;
    Ok(EvaluationReport::from_scores(name, labels, &scores)?)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvaluateError {
    #[error(transparent)]
    Model(#[from] ElmError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.digits$}"))
}

/// Aligned text table: `model, Acc/%, Kap, AUC, η, time/s`, where time is
/// training plus prediction.
pub fn render_table(reports: &[EvaluationReport]) -> String {
    let header = ["model", "Acc/%", "Kap", "AUC", "η", "time/s"];
    let rows: Vec<[String; 6]> = reports
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                format!("{:.2}", r.accuracy * 100.0),
                format!("{:.3}", r.kappa),
                opt(r.auc, 3),
                opt(r.eta, 3),
                format!("{:.3}", r.train_seconds + r.predict_seconds),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        for (k, (cell, w)) in cells.iter().zip(widths).enumerate() {
            let pad = w - cell.chars().count();
            if k == 0 {
                let _ = write!(out, "{cell}{}", " ".repeat(pad));
            } else {
                let _ = write!(out, "  {}{cell}", " ".repeat(pad));
            }
        }
        out.push('\n');
    };
    line(&header.map(String::from));
    for row in &rows {
        line(row);
    }
    for r in reports {
        for w in &r.warnings {
            let _ = writeln!(out, "warning ({}): {w}", r.model);
        }
    }
    out
}

/// Machine-readable report. Timings are included only on request so that
/// the default output is reproducible byte for byte.
pub fn render_csv(reports: &[EvaluationReport], with_times: bool) -> String {
    let mut out = String::from("model,accuracy,kappa,auc,eta,tp,fn,fp,tn");
    if with_times {
        out.push_str(",train_seconds,predict_seconds");
    }
    out.push('\n');
    let field = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    for r in reports {
        let c = &r.confusion;
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.model,
            r.accuracy,
            r.kappa,
            field(r.auc),
            field(r.eta),
            c.tp,
            c.fn_,
            c.fp,
            c.tn
        );
        if with_times {
            let _ = write!(out, ",{},{}", r.train_seconds, r.predict_seconds);
        }
        out.push('\n');
    }
    out
}
