use std::fmt::Write as _;

use serde::Serialize;

use super::optimize::optimize;
use super::PipelineError;
use crate::features::{KnowledgeBase, SplitIndex};
use crate::swarm::{success_rates, Optimizer, SwarmConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRun {
    pub optimizer: Optimizer,
    pub seed: u64,
    pub best_fitness: f64,
    pub effective_hidden: usize,
    pub iterations: usize,
    pub mutations: usize,
    pub total_seconds: f64,
    pub elm_seconds: f64,
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub optimizer: Optimizer,
    pub runs: usize,
    pub mean_best_fitness: f64,
    pub success_rate: f64,
    pub mean_effective_hidden: f64,
    pub mean_total_seconds: f64,
    pub mean_elm_seconds: f64,
}

/// Runs each optimizer `repeats` times with seeds `config.seed + i`.
pub fn compare_optimizers(
    kb: &KnowledgeBase,
    split: &SplitIndex,
    train_fraction: f64,
    config: &SwarmConfig,
    optimizers: &[Optimizer],
    repeats: usize,
) -> Result<(Vec<CompareRun>, Vec<CompareRow>), PipelineError> {
    let mut runs = Vec::new();
    for &optimizer in optimizers {
        for i in 0..repeats {
            let cfg = SwarmConfig { seed: config.seed.wrapping_add(i as u64), ..config.clone() };
            let out = optimize(kb, split, train_fraction, optimizer, &cfg)?;
            log::info!("{optimizer} seed {}: best fitness {}", cfg.seed, out.result.best_fitness);
            runs.push(CompareRun {
                optimizer,
                seed: cfg.seed,
                best_fitness: out.result.best_fitness,
                effective_hidden: out.model.effective_hidden(),
                iterations: out.result.iterations(),
                mutations: out.result.mutation_events(),
                total_seconds: out.total_seconds,
                elm_seconds: out.elm_seconds,
            });
        }
    }
    let per: Vec<Vec<&CompareRun>> =
        optimizers.iter().map(|o| runs.iter().filter(|r| r.optimizer == *o).collect()).collect();
    let rates = success_rates(&per.iter().map(|rs| rs.iter().map(|r| r.best_fitness).collect()).collect::<Vec<_>>());
    let mean = |rs: &[&CompareRun], f: &dyn Fn(&CompareRun) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / rs.len().max(1) as f64;
    let rows = optimizers
        .iter()
        .zip(&per)
        .zip(rates)
        .map(|((&optimizer, rs), success_rate)| CompareRow {
            optimizer,
            runs: rs.len(),
            mean_best_fitness: mean(rs, &|r| r.best_fitness),
            success_rate,
            mean_effective_hidden: mean(rs, &|r| r.effective_hidden as f64),
            mean_total_seconds: mean(rs, &|r| r.total_seconds),
            mean_elm_seconds: mean(rs, &|r| r.elm_seconds),
        })
        .collect();
    Ok((runs, rows))
}

/// `optimizer,runs,best_fitness,success_rate,hidden_nodes` plus, on
/// request, the two timing columns.
pub fn render_compare_csv(rows: &[CompareRow], with_times: bool) -> String {
    let mut out = String::from("optimizer,runs,best_fitness,success_rate,hidden_nodes");
    if with_times {
        out.push_str(",train_seconds,fitness_seconds");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            r.optimizer, r.runs, r.mean_best_fitness, r.success_rate, r.mean_effective_hidden
        );
        if with_times {
            let _ = write!(out, ",{},{}", r.mean_total_seconds, r.mean_elm_seconds);
        }
        out.push('\n');
    }
    out
}

pub fn render_compare_table(rows: &[CompareRow]) -> String {
    let mut out = format!(
        "{:<10}{:>16}{:>16}{:>18}{:>16}{:>14}\n",
        "algorithm", "train time/s", "fitness time/s", "best fitness/%", "success/%", "hidden nodes"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<10}{:>16.3}{:>16.3}{:>18.2}{:>16.0}{:>14.2}",
            r.optimizer.to_string().to_uppercase(),
            r.mean_total_seconds,
            r.mean_elm_seconds,
            r.mean_best_fitness * 100.0,
            r.success_rate * 100.0,
            r.mean_effective_hidden
        );
    }
    out
}
