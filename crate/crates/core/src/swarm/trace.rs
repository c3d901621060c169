use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub best_fitness: f64,
    pub avg_fitness: f64,
    pub variance: f64,
    pub mutated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Record 0 is the initial population.
    pub trace: Vec<IterationRecord>,
}

impl OptimizationResult {
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.iteration)
    }

    pub fn mutation_events(&self) -> usize {
        self.trace.iter().filter(|r| r.mutated).count()
    }
}

/// `iteration,best_fitness,avg_fitness,variance,mutated`, one row per record.
pub fn write_trace_csv<W: Write>(records: &[IterationRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Fraction of runs whose best fitness reaches 95% of the best fitness seen
/// in any run of any algorithm. `runs[a][r]` is run `r` of algorithm `a`.
pub fn success_rates(runs: &[Vec<f64>]) -> Vec<f64> {
    let top = runs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    runs.iter()
        .map(|r| {
            if r.is_empty() {
                0.0
            } else {
                r.iter().filter(|f| **f >= 0.95 * top).count() as f64 / r.len() as f64
            }
        })
        .collect()
}
