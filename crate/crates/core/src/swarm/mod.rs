//! Particle swarm (plain and variance-monitored with mutation) and genetic
//! search over the mixed-integer ELM parameterization.

mod config;
mod encoding;
mod fitness;
mod ga;
mod pso;
mod trace;

pub use config::SwarmConfig;
pub use encoding::{decode_particle, DecodedParticle, EncodingSpec};
pub use fitness::{CvFitness, Fitness, FnFitness};
pub use ga::{run_ga, uniform_crossover};
pub use pso::{
    fitness_variance, mutate_value, premature_band, premature_check, run_ipso, run_pso, velocity_update, Particle,
    SwarmState,
};
pub use trace::{success_rates, write_trace_csv, IterationRecord, OptimizationResult};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SwarmError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Ipso,
    Pso,
    Ga,
}

impl Optimizer {
    pub const ALL: [Optimizer; 3] = [Optimizer::Ipso, Optimizer::Pso, Optimizer::Ga];

    pub fn run<F: Fitness + ?Sized>(self, fitness: &F, config: &SwarmConfig) -> Result<OptimizationResult, SwarmError> {
        match self {
            Optimizer::Ipso => run_ipso(fitness, config),
            Optimizer::Pso => run_pso(fitness, config),
            Optimizer::Ga => run_ga(fitness, config),
        }
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimizer::Ipso => "ipso",
            Optimizer::Pso => "pso",
            Optimizer::Ga => "ga",
        })
    }
}

impl FromStr for Optimizer {
    type Err = SwarmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ipso" => Ok(Optimizer::Ipso),
            "pso" => Ok(Optimizer::Pso),
            "ga" => Ok(Optimizer::Ga),
            other => Err(SwarmError::InvalidConfig(format!("unknown optimizer {other:?} (expected ipso, pso or ga)"))),
        }
    }
}
