//! Classical-model time-domain simulation of multi-machine systems under
//! three-phase faults.

mod equilibrium;
mod format;
mod integrate;
mod model;
mod scenario;

pub use equilibrium::{apply_load_level, solve_equilibrium, OperatingPoint, EQUILIBRIUM_TOL, MAX_LOAD_LEVEL, MIN_LOAD_LEVEL};
pub use format::{format_model, load_model, parse_model};
pub use integrate::{rk4_step, simulate_trajectory, SwingState, Trajectory, OVERFLOW_DEGREES};
pub use model::{electrical_powers, node_powers, Admittance, FaultCase, Generator, InfiniteBus, PowerSystemModel};
pub use scenario::{
    build_scenario_grid, ScenarioGridSpec, SimulationScenario, DEFAULT_HORIZON_AFTER_CLEARING, MAX_CLEARING_CYCLES,
    MIN_CLEARING_CYCLES,
};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("unknown fault {0:?}")]
    UnknownFault(String),
    #[error("{0}")]
    Domain(String),
    #[error("equilibrium solver did not converge")]
    NoConvergence,
    #[error("operating point infeasible: power mismatch {0:e} pu at the reference machine")]
    InfeasibleOperatingPoint(f64),
    #[error("no prefault equilibrium at load level {0}")]
    NoEquilibrium(f64),
    #[error("numeric overflow at t = {time} s: rotor angle {angle} deg")]
    NumericOverflow { time: f64, angle: f64 },
}
