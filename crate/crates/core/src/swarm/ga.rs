use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::SwarmConfig;
use super::fitness::Fitness;
use super::pso::{evaluate_all, fitness_variance, random_positions};
use super::trace::{IterationRecord, OptimizationResult};
use super::SwarmError;
use crate::rng::{stream, Purpose};

/// Per-gene choice between two parents.
pub fn uniform_crossover(a: &[f64], b: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| if rng.gen::<bool>() { *x } else { *y }).collect()
}

fn tournament(fitness: &[f64], size: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.gen_range(0..fitness.len());
        if fitness[c] > fitness[best] {
            best = c;
        }
    }
    best
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Real-coded GA on [0,1]^D: tournament selection, uniform crossover,
/// per-gene uniform reset, one elite carried over unchanged.
pub fn run_ga<F: Fitness + ?Sized>(fitness: &F, config: &SwarmConfig) -> Result<OptimizationResult, SwarmError> {
    config.validate()?;
    let mut population = random_positions(config, fitness.dimension());
    let refs: Vec<&[f64]> = population.iter().map(Vec::as_slice).collect();
    let mut values = evaluate_all(fitness, &refs);
    let elite = argmax(&values);
    let mut best_position = population[elite].clone();
    let mut best_fitness = values[elite];
    let mut trace = vec![record(0, best_fitness, &values)];

    let mut generation = 0;
    while generation < config.max_iterations && !(best_fitness > config.fitness_target) {
        generation += 1;
        let elite = argmax(&values);
        let mut next = vec![population[elite].clone()];
        for slot in 1..population.len() {
            let mut rng = stream(config.seed, Purpose::Genetic, slot, generation);
            let p1 = tournament(&values, config.tournament_size, &mut rng);
            let p2 = tournament(&values, config.tournament_size, &mut rng);
            let mut child = if rng.gen::<f64>() < config.crossover_probability {
                uniform_crossover(&population[p1], &population[p2], &mut rng)
            } else {
                population[p1].clone()
            };
            for gene in child.iter_mut() {
                if rng.gen::<f64>() < config.gene_mutation_probability {
                    *gene = rng.gen();
                }
            }
            next.push(child);
        }
        let refs: Vec<&[f64]> = next[1..].iter().map(Vec::as_slice).collect();
        let mut next_values = vec![values[elite]];
        next_values.extend(evaluate_all(fitness, &refs));
        population = next;
        values = next_values;
        let i = argmax(&values);
        if values[i] > best_fitness {
            best_fitness = values[i];
            best_position.clone_from(&population[i]);
        }
        trace.push(record(generation, best_fitness, &values));
    }
    Ok(OptimizationResult { best_position, best_fitness, trace })
}

fn record(iteration: usize, best_fitness: f64, values: &[f64]) -> IterationRecord {
    IterationRecord {
        iteration,
        best_fitness,
        avg_fitness: values.iter().sum::<f64>() / values.len() as f64,
        variance: fitness_variance(values),
        mutated: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swarm::fitness::FnFitness;
    use rand::SeedableRng;

    #[test]
    fn crossover_of_identical_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = vec![0.1, 0.7, 0.3];
        assert_eq!(uniform_crossover(&a, &a, &mut rng), a);
    }

    #[test]
    fn elitism_without_variation() {
        let f = FnFitness::new(2, |x: &[f64]| x[0] * x[1]);
        let c = SwarmConfig {
            crossover_probability: 0.0,
            gene_mutation_probability: 0.0,
            max_iterations: 20,
            fitness_target: 1.0,
            ..SwarmConfig::default()
        };
        let r = run_ga(&f, &c).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness));
        assert_eq!(r, run_ga(&f, &c).unwrap());
    }

    #[test]
    fn sphere_converges() {
        let f = FnFitness::new(1, |x: &[f64]| 1.0 - (x[0] - 0.3).powi(2));
        let c = SwarmConfig { fitness_target: 1.0, seed: 3, ..SwarmConfig::default() };
        let r = run_ga(&f, &c).unwrap();
        assert!((r.best_position[0] - 0.3).abs() < 0.05);
    }
}
