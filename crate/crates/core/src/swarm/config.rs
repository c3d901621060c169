use serde::{Deserialize, Serialize};

use super::SwarmError;

/// Optimizer settings shared by PSO, IPSO and the GA baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmConfig {
    pub population: usize,
    pub max_iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub inertia_start: f64,
    pub inertia_end: f64,
    /// Velocity clamp as a fraction of the unit range.
    pub v_max: f64,
    pub mutation_coefficient: f64,
    pub premature_low: f64,
    pub premature_high: f64,
    pub variance_floor: f64,
    /// The run stops once the best fitness exceeds this.
    pub fitness_target: f64,
    /// Hidden-neuron budget L.
    pub hidden_neurons: usize,
    pub folds: usize,
    pub crossover_probability: f64,
    pub gene_mutation_probability: f64,
    pub tournament_size: usize,
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            population: 20,
            max_iterations: 200,
            c1: 2.0,
            c2: 2.0,
            inertia_start: 0.9,
            inertia_end: 0.4,
            v_max: 0.2,
            mutation_coefficient: 0.1,
            premature_low: 0.9,
            premature_high: 1.1,
            variance_floor: 1e-4,
            fitness_target: 0.99,
            hidden_neurons: 50,
            folds: 5,
            crossover_probability: 0.85,
            gene_mutation_probability: 0.01,
            tournament_size: 2,
            seed: 0,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<(), SwarmError> {
        let fail = |msg: String| Err(SwarmError::InvalidConfig(msg));
        if self.population < 2 {
            return fail(format!("population must be at least 2, got {}", self.population));
        }
        if !(0.0 < self.premature_low && self.premature_low < 1.0 && 1.0 < self.premature_high) {
            return fail(format!(
                "premature band must satisfy 0 < low < 1 < high, got ({}, {})",
                self.premature_low, self.premature_high
            ));
        }
        if !(self.mutation_coefficient > 0.0) {
            return fail(format!("mutation coefficient must be positive, got {}", self.mutation_coefficient));
        }
        if !(0.0..=1.0).contains(&self.fitness_target) {
            return fail(format!("fitness target must be in [0, 1], got {}", self.fitness_target));
        }
        if !(self.v_max > 0.0) || !(self.variance_floor >= 0.0) {
            return fail("v_max must be positive and the variance floor non-negative".into());
        }
        if ![self.c1, self.c2, self.inertia_start, self.inertia_end].iter().all(|v| v.is_finite() && *v >= 0.0) {
            return fail("learning factors and inertia weights must be finite and non-negative".into());
        }
        if self.hidden_neurons == 0 || self.folds < 2 || self.tournament_size == 0 {
            return fail("hidden_neurons >= 1, folds >= 2 and tournament_size >= 1 required".into());
        }
        for p in [self.crossover_probability, self.gene_mutation_probability] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("probability {p} outside [0, 1]"));
            }
        }
        Ok(())
    }

    /// Inertia weight for update `k` (1-based), linear from start to end
    /// over the iteration budget.
    pub fn inertia(&self, k: usize) -> f64 {
        if self.max_iterations <= 1 {
            return self.inertia_start;
        }
        let t = (k.saturating_sub(1)) as f64 / (self.max_iterations - 1) as f64;
        self.inertia_start + (self.inertia_end - self.inertia_start) * t.min(1.0)
    }

    pub fn from_toml(text: &str) -> Result<Self, SwarmError> {
        let cfg: Self = toml::from_str(text).map_err(|e| SwarmError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SwarmConfig::default();
        c.validate().unwrap();
        assert_eq!(c.inertia(1), 0.9);
        assert!((c.inertia(200) - 0.4).abs() < 1e-15);
        assert!((c.inertia(100) - (0.9 - 0.5 * 99.0 / 199.0)).abs() < 1e-15);
    }

    #[test]
    fn toml_overrides() {
        let c = SwarmConfig::from_toml("population = 5\nfitness_target = 1.0\n").unwrap();
        assert_eq!((c.population, c.max_iterations, c.fitness_target), (5, 200, 1.0));
        assert!(SwarmConfig::from_toml("population = 1").is_err());
        assert!(SwarmConfig::from_toml("premature_low = 1.2").is_err());
        assert!(SwarmConfig::from_toml("popsize = 3").is_err());
    }
}
