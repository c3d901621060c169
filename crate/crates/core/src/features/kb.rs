use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::label::ClassLabel;
use super::standardize::Standardizer;
use super::FeatureError;
use crate::simkit::ScenarioGridSpec;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub system: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<ScenarioGridSpec>,
}

/// Labeled samples, one row per disturbance case.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    samples: DMatrix<f64>,
    labels: Vec<ClassLabel>,
    feature_names: Vec<String>,
    pub provenance: Provenance,
}

impl KnowledgeBase {
    /// Validates shapes, finiteness and the presence of both classes.
    pub fn new(
        samples: DMatrix<f64>,
        labels: Vec<ClassLabel>,
        feature_names: Vec<String>,
        provenance: Provenance,
    ) -> Result<Self, FeatureError> {
        if samples.nrows() != labels.len() {
            return Err(FeatureError::Malformed(format!(
                "{} sample rows but {} labels",
                samples.nrows(),
                labels.len()
            )));
        }
        if samples.ncols() != feature_names.len() {
            return Err(FeatureError::DimensionMismatch { expected: feature_names.len(), found: samples.ncols() });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(FeatureError::Malformed("non-finite feature value".into()));
        }
        let kb = Self { samples, labels, feature_names, provenance };
        let (pos, neg) = kb.class_counts();
        if pos == 0 || neg == 0 {
            return Err(FeatureError::SingleClass { stable: pos, unstable: neg });
        }
        Ok(kb)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.samples.ncols()
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.samples.row(i).iter().copied().collect()
    }

    /// (stable, unstable) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|l| **l == ClassLabel::Stable).count();
        (pos, self.labels.len() - pos)
    }

    /// Rows `rows` of the samples as a new matrix.
    pub fn select_rows(&self, rows: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), self.dimension(), |i, j| self.samples[(rows[i], j)])
    }

    pub fn select_labels(&self, rows: &[usize]) -> Vec<ClassLabel> {
        rows.iter().map(|&i| self.labels[i]).collect()
    }

    /// Fits z-score statistics on `train_rows` and applies them to every row.
    /// Returns the standardized knowledge base, the statistics, and the names
    /// of constant (zeroed) features.
    pub fn standardize(&self, train_rows: &[usize]) -> Result<(KnowledgeBase, Standardizer, Vec<String>), FeatureError> {
        let stats = Standardizer::fit(&self.samples, train_rows)?;
        let flagged = stats
            .constant_features()
            .into_iter()
            .map(|j| self.feature_names[j].clone())
            .collect();
        let kb = KnowledgeBase {
            samples: stats.transform(&self.samples)?,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
            provenance: self.provenance.clone(),
        };
        Ok((kb, stats, flagged))
    }

    /// CSV with header `label,f_0,...,f_{n-1}`; values printed in shortest
    /// round-trip form.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FeatureError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["label".to_string()];
        header.extend((0..self.dimension()).map(|j| format!("f_{j}")));
        w.write_record(&header)?;
        for (i, label) in self.labels.iter().enumerate() {
            let mut rec = vec![label.to_string()];
            rec.extend(self.samples.row(i).iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| FeatureError::Io("csv".into(), e))?;
        Ok(())
    }

    pub fn save(&self, csv_path: &Path, meta: &KbMetadata) -> Result<(), FeatureError> {
        let file = std::fs::File::create(csv_path).map_err(|e| FeatureError::Io(csv_path.display().to_string(), e))?;
        self.write_csv(std::io::BufWriter::new(file))?;
        let meta_path = metadata_path(csv_path);
        std::fs::write(&meta_path, meta.to_toml()).map_err(|e| FeatureError::Io(meta_path.display().to_string(), e))
    }

    /// Loads the CSV and its sidecar (feature names and provenance).
    pub fn load(csv_path: &Path) -> Result<(KnowledgeBase, KbMetadata), FeatureError> {
        let meta_path = metadata_path(csv_path);
        let meta_text =
            std::fs::read_to_string(&meta_path).map_err(|e| FeatureError::Io(meta_path.display().to_string(), e))?;
        let meta = KbMetadata::from_toml(&meta_text)?;
        let file = std::fs::File::open(csv_path).map_err(|e| FeatureError::Io(csv_path.display().to_string(), e))?;
        let (samples, labels) = read_csv(file)?;
        let provenance = Provenance { system: meta.system.clone(), seed: meta.seed, grid: meta.grid.clone() };
        let kb = KnowledgeBase::new(samples, labels, meta.feature_names.clone(), provenance)?;
        Ok((kb, meta))
    }
}

/// Parses a knowledge-base CSV into (samples, labels).
pub fn read_csv<R: Read>(input: R) -> Result<(DMatrix<f64>, Vec<ClassLabel>), FeatureError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("label") {
        return Err(FeatureError::Malformed("first CSV column must be `label`".into()));
    }
    let n = header.len() - 1;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != n + 1 {
            return Err(FeatureError::Malformed(format!("row {} has {} fields, expected {}", line + 1, rec.len(), n + 1)));
        }
        labels.push(rec[0].parse::<ClassLabel>()?);
        for field in rec.iter().skip(1) {
            values.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| FeatureError::Malformed(format!("row {}: bad number {field:?}", line + 1)))?,
            );
        }
    }
    Ok((DMatrix::from_row_slice(labels.len(), n, &values), labels))
}

/// Sidecar path for a knowledge-base CSV: `kb.csv` → `kb.meta.toml`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.toml")
}

/// Sidecar of a knowledge-base CSV. The standardization statistics are
/// those of the training rows selected by `split_seed` and
/// `train_fraction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbMetadata {
    pub system: String,
    pub seed: u64,
    pub split_seed: u64,
    pub train_fraction: f64,
    pub samples: usize,
    pub stable: usize,
    pub unstable: usize,
    pub feature_names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub constant_features: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<ScenarioGridSpec>,
}

impl KbMetadata {
    pub fn from_toml(text: &str) -> Result<Self, FeatureError> {
        toml::from_str(text).map_err(|e| FeatureError::Malformed(format!("metadata: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metadata serializes")
    }

    pub fn standardizer(&self) -> Standardizer {
        Standardizer { mean: self.mean.clone(), std: self.std.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb() -> KnowledgeBase {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.1, 2.0, -1e-7, 3.0, 12345.678]);
        let labels = vec![ClassLabel::Stable, ClassLabel::Unstable, ClassLabel::Stable];
        KnowledgeBase::new(x, labels, vec!["a".into(), "b".into()], Provenance::default()).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let kb = kb();
        let mut buf = Vec::new();
        kb.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("label,f_0,f_1\n+1,1,0.1\n-1,2,"));
        let (x, labels) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(&x, kb.samples());
        assert_eq!(labels, kb.labels());
    }

    #[test]
    fn single_class_rejected() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        let err = KnowledgeBase::new(x, vec![ClassLabel::Stable; 2], vec!["a".into()], Provenance::default());
        assert!(matches!(err, Err(FeatureError::SingleClass { stable: 2, unstable: 0 })));
    }

    #[test]
    fn malformed_csv() {
        assert!(read_csv("label,f_0\n+1,abc\n".as_bytes()).is_err());
        assert!(read_csv("label,f_0\n0,1\n".as_bytes()).is_err());
        assert!(read_csv("lbl,f_0\n+1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn standardized_columns() {
        let (z, stats, flagged) = kb().standardize(&[0, 1, 2]).unwrap();
        assert!(flagged.is_empty());
        for j in 0..2 {
            let col: Vec<f64> = z.samples().column(j).iter().copied().collect();
            let m = col.iter().sum::<f64>() / 3.0;
            let s = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 2.0).sqrt();
            assert!(m.abs() < 1e-9 && (s - 1.0).abs() < 1e-9);
        }
        assert_eq!(stats.dimension(), 2);
    }

    #[test]
    fn sidecar_path() {
        assert_eq!(metadata_path(Path::new("out/kb.csv")), PathBuf::from("out/kb.meta.toml"));
    }
}
