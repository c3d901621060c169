use rand::Rng;
use rayon::prelude::*;

use super::config::SwarmConfig;
use super::fitness::Fitness;
use super::trace::{IterationRecord, OptimizationResult};
use super::SwarmError;
use crate::rng::{stream, Purpose};

/// One-dimensional velocity update, before clamping:
/// `w·v + c1·r1·(p − s) + c2·r2·(g − s)`.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn velocity_update(w: f64, c1: f64, c2: f64, r1: f64, r2: f64, v: f64, s: f64, p: f64, g: f64) -> f64 {
    w * v + c1 * r1 * (p - s) + c2 * r2 * (g - s)
}

/// Population fitness variance normalized by the best fitness,
/// `Σ ((f_i − f_avg) / f_best)²`. When the best fitness is (near) zero the
/// normalizer is dropped.
pub fn fitness_variance(fitnesses: &[f64]) -> f64 {
    if fitnesses.is_empty() {
        return 0.0;
    }
    // Mean taken relative to the first entry so equal fitnesses give exactly 0.
    let f0 = fitnesses[0];
    let avg = f0 + fitnesses.iter().map(|f| f - f0).sum::<f64>() / fitnesses.len() as f64;
    let best = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = if best.abs() < 1e-12 { 1.0 } else { best };
    fitnesses.iter().map(|f| ((f - avg) / scale).powi(2)).sum()
}

/// `low < next / prev < high`; a variance that stays at exactly zero counts
/// as inside the band.
pub fn premature_band(prev: f64, next: f64, low: f64, high: f64) -> bool {
    if prev == 0.0 {
        return next == 0.0;
    }
    let ratio = next / prev;
    low < ratio && ratio < high
}

/// Stagnation test: the variance ratio is inside the band, the variance is
/// below the floor, and the global best did not improve.
pub fn premature_check(prev: f64, next: f64, best_improved: bool, config: &SwarmConfig) -> bool {
    !best_improved
        && next < config.variance_floor
        && premature_band(prev, next, config.premature_low, config.premature_high)
}

/// `x + c_m·(rand − 0.5)` clamped to [0, 1].
#[inline]
pub fn mutate_value(x: f64, c_m: f64, rand: f64) -> f64 {
    (x + c_m * (rand - 0.5)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub fitness: f64,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Particle whose personal best is the global best.
    pub best_owner: usize,
    pub iteration: usize,
    pub variance: Vec<f64>,
    pub records: Vec<IterationRecord>,
}

pub(crate) fn evaluate_all<F: Fitness + ?Sized>(fitness: &F, positions: &[&[f64]]) -> Vec<f64> {
    positions.par_iter().map(|p| fitness.evaluate(p)).collect()
}

pub(crate) fn random_positions(config: &SwarmConfig, dimension: usize) -> Vec<Vec<f64>> {
    (0..config.population)
        .map(|i| {
            let mut rng = stream(config.seed, Purpose::Init, i, 0);
            (0..dimension).map(|_| rng.gen::<f64>()).collect()
        })
        .collect()
}

impl SwarmState {
    /// Random positions and velocities, evaluated once (iteration 0).
    pub fn initialize<F: Fitness + ?Sized>(fitness: &F, config: &SwarmConfig) -> Result<Self, SwarmError> {
        config.validate()?;
        let d = fitness.dimension();
        let positions = random_positions(config, d);
        let velocities: Vec<Vec<f64>> = (0..config.population)
            .map(|i| {
                let mut rng = stream(config.seed, Purpose::Init, i, 1);
                (0..d).map(|_| rng.gen_range(-config.v_max..=config.v_max)).collect()
            })
            .collect();
        Ok(Self::from_positions(fitness, positions, velocities))
    }

    /// State with the given positions and velocities, evaluated once.
    pub fn from_positions<F: Fitness + ?Sized>(fitness: &F, positions: Vec<Vec<f64>>, velocities: Vec<Vec<f64>>) -> Self {
        let refs: Vec<&[f64]> = positions.iter().map(Vec::as_slice).collect();
        let values = evaluate_all(fitness, &refs);
        let particles: Vec<Particle> = positions
            .into_iter()
            .zip(velocities)
            .zip(&values)
            .map(|((position, velocity), &f)| Particle {
                best_position: position.clone(),
                position,
                velocity,
                fitness: f,
                best_fitness: f,
            })
            .collect();
        let mut owner = 0;
        for (i, p) in particles.iter().enumerate() {
            if p.best_fitness > particles[owner].best_fitness {
                owner = i;
            }
        }
        let variance = fitness_variance(&values);
        let mut state = Self {
            best_position: particles[owner].best_position.clone(),
            best_fitness: particles[owner].best_fitness,
            best_owner: owner,
            particles,
            iteration: 0,
            variance: vec![variance],
            records: Vec::new(),
        };
        state.record(false);
        state
    }

    pub fn fitnesses(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.fitness).collect()
    }

    fn record(&mut self, mutated: bool) {
        let f = self.fitnesses();
        self.records.push(IterationRecord {
            iteration: self.iteration,
            best_fitness: self.best_fitness,
            avg_fitness: f.iter().sum::<f64>() / f.len() as f64,
            variance: *self.variance.last().expect("variance recorded"),
            mutated,
        });
    }

    /// Updates personal and global bests of `indices` (strict improvement).
    /// Returns whether the global best improved.
    fn update_bests(&mut self, indices: &[usize]) -> bool {
        let before = self.best_fitness;
        for &i in indices {
            let p = &mut self.particles[i];
            if p.fitness > p.best_fitness {
                p.best_fitness = p.fitness;
                p.best_position.clone_from(&p.position);
            }
            if p.best_fitness > self.best_fitness {
                self.best_fitness = p.best_fitness;
                self.best_position.clone_from(&p.best_position);
                self.best_owner = i;
            }
        }
        self.best_fitness > before
    }

    /// Velocity and position update of every particle with fresh
    /// per-dimension r1, r2, then re-evaluation. Returns whether the global
    /// best improved. Does not append a trace record.
    pub fn pso_step<F: Fitness + ?Sized>(&mut self, fitness: &F, config: &SwarmConfig) -> bool {
        self.iteration += 1;
        let k = self.iteration;
        let w = config.inertia(k);
        let g = &self.best_position;
        for (i, p) in self.particles.iter_mut().enumerate() {
            let mut rng = stream(config.seed, Purpose::Velocity, i, k);
            for (d, &gd) in g.iter().enumerate() {
                let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
                let s = p.position[d];
                let v = velocity_update(w, config.c1, config.c2, r1, r2, p.velocity[d], s, p.best_position[d], gd)
                    .clamp(-config.v_max, config.v_max);
                p.velocity[d] = v;
                p.position[d] = (s + v).clamp(0.0, 1.0);
            }
        }
        let refs: Vec<&[f64]> = self.particles.iter().map(|p| p.position.as_slice()).collect();
        let values = evaluate_all(fitness, &refs);
        for (p, f) in self.particles.iter_mut().zip(values) {
            p.fitness = f;
        }
        let all: Vec<usize> = (0..self.particles.len()).collect();
        self.update_bests(&all)
    }

    /// Perturbs every particle except the global-best owner, re-evaluates
    /// them and updates the bests. Returns the indices that were mutated.
    pub fn mutate<F: Fitness + ?Sized>(&mut self, fitness: &F, config: &SwarmConfig) -> Vec<usize> {
        let k = self.iteration;
        let targets: Vec<usize> = (0..self.particles.len()).filter(|&i| i != self.best_owner).collect();
        for &i in &targets {
            let mut rng = stream(config.seed, Purpose::Mutation, i, k);
            for x in self.particles[i].position.iter_mut() {
                *x = mutate_value(*x, config.mutation_coefficient, rng.gen());
            }
        }
        let refs: Vec<&[f64]> = targets.iter().map(|&i| self.particles[i].position.as_slice()).collect();
        let values = evaluate_all(fitness, &refs);
        for (&i, f) in targets.iter().zip(values) {
            self.particles[i].fitness = f;
        }
        self.update_bests(&targets);
        targets
    }

    fn finish(self) -> OptimizationResult {
        OptimizationResult { best_position: self.best_position, best_fitness: self.best_fitness, trace: self.records }
    }
}

/// Plain PSO; `run_ipso` without the variance monitor.
pub fn run_pso<F: Fitness + ?Sized>(fitness: &F, config: &SwarmConfig) -> Result<OptimizationResult, SwarmError> {
    run(fitness, config, false)
}

/// PSO with fitness-variance monitoring and mutation of stagnant swarms.
pub fn run_ipso<F: Fitness + ?Sized>(fitness: &F, config: &SwarmConfig) -> Result<OptimizationResult, SwarmError> {
    run(fitness, config, true)
}

fn run<F: Fitness + ?Sized>(fitness: &F, config: &SwarmConfig, monitor: bool) -> Result<OptimizationResult, SwarmError> {
    let mut state = SwarmState::initialize(fitness, config)?;
    while state.iteration < config.max_iterations && !(state.best_fitness > config.fitness_target) {
        let improved = state.pso_step(fitness, config);
        let prev = *state.variance.last().expect("variance recorded");
        let mut next = fitness_variance(&state.fitnesses());
        let mut mutated = false;
        if monitor && premature_check(prev, next, improved, config) {
            state.mutate(fitness, config);
            next = fitness_variance(&state.fitnesses());
            mutated = true;
        }
        state.variance.push(next);
        state.record(mutated);
    }
    Ok(state.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swarm::fitness::FnFitness;

    #[test]
    fn worked_examples() {
        let v = velocity_update(0.9, 2.0, 2.0, 0.5, 0.5, 0.1, 0.5, 0.6, 0.7);
        assert!((v - 0.39).abs() < 1e-12);
        assert!((0.5 + v - 0.89).abs() < 1e-12);
        assert_eq!(velocity_update(0.9, 2.0, 2.0, 0.3, 0.8, 0.0, 0.4, 0.4, 0.4), 0.0);
        assert!((fitness_variance(&[0.5, 1.0]) - 0.125).abs() < 1e-12);
        assert_eq!(fitness_variance(&[0.8, 0.8, 0.8]), 0.0);
        assert_eq!(fitness_variance(&[0.0, 0.0]), 0.0);
        assert_eq!(mutate_value(0.5, 0.1, 0.5), 0.5);
        assert!((mutate_value(0.5, 0.1, 1.0) - 0.55).abs() < 1e-12);
        assert_eq!(mutate_value(0.999, 0.1, 1.0), 1.0);
    }

    #[test]
    fn premature_rules() {
        let c = SwarmConfig::default();
        assert!(premature_check(1e-5, 1e-5, false, &c));
        assert!(!premature_check(1e-5, 1e-5, true, &c));
        assert!(!premature_check(0.5, 0.5, false, &c));
        assert!(!premature_check(1e-5, 1e-7, false, &c));
        assert!(premature_check(0.0, 0.0, false, &c));
        assert!(!premature_band(0.0, 1e-9, 0.9, 1.1));
    }

    fn sphere() -> FnFitness<impl Fn(&[f64]) -> f64 + Sync> {
        FnFitness::new(1, |x: &[f64]| 1.0 - (x[0] - 0.3).powi(2))
    }

    #[test]
    fn zero_budget_returns_initial_best() {
        let f = sphere();
        let c = SwarmConfig { max_iterations: 0, seed: 4, ..SwarmConfig::default() };
        let r = run_pso(&f, &c).unwrap();
        let init = SwarmState::initialize(&f, &c).unwrap();
        assert_eq!(r.best_fitness, init.best_fitness);
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn target_zero_stops_after_initial_round() {
        let f = sphere();
        let c = SwarmConfig { fitness_target: 0.0, ..SwarmConfig::default() };
        assert_eq!(run_ipso(&f, &c).unwrap().trace.len(), 1);
    }

    #[test]
    fn clamping_and_containment() {
        let f = FnFitness::new(3, |x: &[f64]| x.iter().sum::<f64>());
        let c = SwarmConfig { max_iterations: 30, fitness_target: 1.0, seed: 9, ..SwarmConfig::default() };
        let mut s = SwarmState::initialize(&f, &c).unwrap();
        for _ in 0..30 {
            s.pso_step(&f, &c);
            for p in &s.particles {
                assert!(p.position.iter().all(|x| (0.0..=1.0).contains(x)));
                assert!(p.velocity.iter().all(|v| v.abs() <= c.v_max));
            }
        }
    }

    #[test]
    fn stagnant_swarm_is_mutated() {
        let f = FnFitness::new(2, |x: &[f64]| 0.5 - 0.1 * (x[0] - 0.5).abs());
        let c = SwarmConfig { population: 6, ..SwarmConfig::default() };
        let mut s = SwarmState::from_positions(&f, vec![vec![0.5, 0.5]; 6], vec![vec![0.0; 2]; 6]);
        let best = s.best_fitness;
        assert!(!s.pso_step(&f, &c));
        let prev = s.variance[0];
        let next = fitness_variance(&s.fitnesses());
        assert!(premature_check(prev, next, false, &c));
        let changed = s.mutate(&f, &c);
        assert_eq!(changed.len(), 5);
        let moved = s.particles.iter().filter(|p| p.position != vec![0.5, 0.5]).count();
        assert!(moved >= 5);
        assert!(s.best_fitness >= best);
    }

    #[test]
    fn deterministic_and_monotone() {
        let f = sphere();
        let c = SwarmConfig { max_iterations: 50, fitness_target: 1.0, seed: 17, ..SwarmConfig::default() };
        let a = run_ipso(&f, &c).unwrap();
        assert_eq!(a, run_ipso(&f, &c).unwrap());
        assert!(a.trace.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness));
        assert_eq!(a.trace.len(), 51);
    }
}
