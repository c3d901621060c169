use std::path::Path;

use serde::{Deserialize, Serialize};

use super::equilibrium::{MAX_LOAD_LEVEL, MIN_LOAD_LEVEL};
use super::SimError;
use crate::rng::derive_seed;

pub const MIN_CLEARING_CYCLES: f64 = 5.0;
pub const MAX_CLEARING_CYCLES: f64 = 10.0;
/// Seconds simulated after fault clearing when the grid does not say.
pub const DEFAULT_HORIZON_AFTER_CLEARING: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationScenario {
    pub fault: String,
    pub clearing_cycles: f64,
    /// Fraction of the base load.
    pub load_level: f64,
    /// Integration step in seconds.
    pub step: f64,
    /// Simulated time span in seconds, measured from fault inception.
    pub horizon: f64,
    pub seed: u64,
}

/// Scenario grid file: Cartesian product of faults, clearing times and
/// load levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioGridSpec {
    pub faults: Vec<String>,
    pub clearing_cycles: Vec<f64>,
    pub load_levels: Vec<f64>,
    /// Integration step in seconds; defaults to a quarter cycle.
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default = "default_horizon")]
    pub horizon_after_clearing: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_horizon() -> f64 {
    DEFAULT_HORIZON_AFTER_CLEARING
}

impl ScenarioGridSpec {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Parse { line: 0, msg: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("grid spec serializes")
    }

    pub fn len(&self) -> usize {
        self.faults.len() * self.clearing_cycles.len() * self.load_levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Expands the grid in fault-major, then clearing time, then load level
/// order. Scenario `i` gets a seed derived from `seed` and `i`.
pub fn build_scenario_grid(
    spec: &ScenarioGridSpec,
    base_frequency: f64,
    seed: u64,
) -> Result<Vec<SimulationScenario>, SimError> {
    if spec.is_empty() {
        return Err(SimError::Domain("scenario grid has an empty list".into()));
    }
    if let Some(c) = spec
        .clearing_cycles
        .iter()
        .find(|c| !(MIN_CLEARING_CYCLES..=MAX_CLEARING_CYCLES).contains(*c))
    {
        return Err(SimError::Domain(format!(
            "clearing time {c} cycles outside [{MIN_CLEARING_CYCLES}, {MAX_CLEARING_CYCLES}]"
        )));
    }
    if let Some(l) = spec
        .load_levels
        .iter()
        .find(|l| !(MIN_LOAD_LEVEL..=MAX_LOAD_LEVEL).contains(*l))
    {
        return Err(SimError::Domain(format!(
            "load level {l} outside [{MIN_LOAD_LEVEL}, {MAX_LOAD_LEVEL}]"
        )));
    }
    if !(base_frequency > 0.0) {
        return Err(SimError::Domain(format!("base frequency must be > 0, got {base_frequency}")));
    }
    let step = spec.step.unwrap_or(1.0 / (4.0 * base_frequency));
    if !(step > 0.0) {
        return Err(SimError::Domain(format!("integration step must be > 0, got {step}")));
    }
    if !(spec.horizon_after_clearing >= 0.0) {
        return Err(SimError::Domain("horizon after clearing must be >= 0".into()));
    }

    let mut out = Vec::with_capacity(spec.len());
    for fault in &spec.faults {
        for &cycles in &spec.clearing_cycles {
            for &level in &spec.load_levels {
                let index = out.len() as u64;
                out.push(SimulationScenario {
                    fault: fault.clone(),
                    clearing_cycles: cycles,
                    load_level: level,
                    step,
                    horizon: cycles / base_frequency + spec.horizon_after_clearing,
                    seed: derive_seed(seed, index),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ScenarioGridSpec {
        ScenarioGridSpec {
            faults: vec!["a".into(), "b".into()],
            clearing_cycles: vec![5.0, 7.5, 10.0],
            load_levels: vec![0.8, 1.3],
            step: None,
            horizon_after_clearing: 3.0,
            seed: 0,
        }
    }

    #[test]
    fn product_cardinality_and_order() {
        let grid = build_scenario_grid(&spec(), 60.0, 9).unwrap();
        assert_eq!(grid.len(), 12);
        assert_eq!(grid[0].fault, "a");
        assert_eq!(grid[1].load_level, 1.3);
        assert_eq!(grid[2].clearing_cycles, 7.5);
        assert_eq!(grid[11].fault, "b");
        assert_eq!(grid[0].step, 1.0 / 240.0);
        assert!((grid[5].horizon - (10.0 / 60.0 + 3.0)).abs() < 1e-15);
    }

    #[test]
    fn deterministic_and_seeded() {
        let a = build_scenario_grid(&spec(), 60.0, 9).unwrap();
        assert_eq!(a, build_scenario_grid(&spec(), 60.0, 9).unwrap());
        let b = build_scenario_grid(&spec(), 60.0, 10).unwrap();
        assert_ne!(a[0].seed, b[0].seed);
        let mut seeds: Vec<u64> = a.iter().map(|s| s.seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), 12);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut s = spec();
        s.clearing_cycles.push(4.0);
        assert!(matches!(build_scenario_grid(&s, 60.0, 0), Err(SimError::Domain(_))));
        let mut s = spec();
        s.load_levels.push(1.5);
        assert!(matches!(build_scenario_grid(&s, 60.0, 0), Err(SimError::Domain(_))));
        let mut s = spec();
        s.faults.clear();
        assert!(matches!(build_scenario_grid(&s, 60.0, 0), Err(SimError::Domain(_))));
    }

    #[test]
    fn toml_round_trip() {
        let s = spec();
        assert_eq!(ScenarioGridSpec::from_toml(&s.to_toml()).unwrap(), s);
        let fixture = ScenarioGridSpec::from_toml(include_str!("../../fixtures/wscc9_grid.toml")).unwrap();
        assert_eq!(fixture.len(), 308);
        assert!(ScenarioGridSpec::from_toml("faults = []\nbogus = 1").is_err());
    }
}
