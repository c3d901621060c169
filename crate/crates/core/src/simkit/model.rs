use nalgebra::DMatrix;
use num_complex::Complex64;

use super::SimError;

/// Reduced admittance matrix at the generator internal nodes (per-unit).
pub type Admittance = DMatrix<Complex64>;

const SYMMETRY_TOL: f64 = 1e-9;

/// Classical constant-EMF machine behind its transient reactance.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    /// Inertia constant H, seconds on machine base.
    pub inertia: f64,
    /// Damping coefficient D, per-unit power per rad/s.
    pub damping: f64,
    /// Transient reactance x'd, per-unit. Already folded into the matrices.
    pub transient_reactance: f64,
    /// Internal EMF magnitude E, per-unit.
    pub emf: f64,
    /// Mechanical power Pm, per-unit.
    pub mechanical_power: f64,
}

/// Fixed-voltage, fixed-angle source of infinite inertia.
///
/// When present it is the last node of every admittance matrix, sits at
/// angle zero and acts as the angle reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteBus {
    pub voltage: f64,
}

/// A named three-phase fault, represented only by its during-fault matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultCase {
    pub name: String,
    pub admittance: Admittance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSystemModel {
    pub name: String,
    /// Base frequency f0 in hertz.
    pub base_frequency: f64,
    pub generators: Vec<Generator>,
    pub infinite_bus: Option<InfiniteBus>,
    pub prefault: Admittance,
    pub postfault: Admittance,
    pub faults: Vec<FaultCase>,
}

impl PowerSystemModel {
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Number of network nodes: generators plus the infinite bus, if any.
    pub fn node_count(&self) -> usize {
        self.generators.len() + usize::from(self.infinite_bus.is_some())
    }

    /// Synchronous angular speed ω0 = 2π·f0 in rad/s.
    pub fn synchronous_speed(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.base_frequency
    }

    pub fn fault(&self, name: &str) -> Result<&FaultCase, SimError> {
        self.faults
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| SimError::UnknownFault(name.to_string()))
    }

    /// Voltage magnitudes of every node (generator EMFs, then the infinite bus).
    pub fn node_voltages(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.generators.iter().map(|g| g.emf).collect();
        if let Some(bus) = self.infinite_bus {
            v.push(bus.voltage);
        }
        v
    }

    /// Node angles in radians for the given generator angles.
    pub fn node_angles(&self, generator_angles: &[f64]) -> Vec<f64> {
        let mut a = generator_angles.to_vec();
        if self.infinite_bus.is_some() {
            a.push(0.0);
        }
        a
    }

    pub fn mechanical_powers(&self) -> Vec<f64> {
        self.generators.iter().map(|g| g.mechanical_power).collect()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let invalid = |msg: String| Err(SimError::InvalidModel(msg));
        if self.generators.is_empty() {
            return invalid("model has no generators".into());
        }
        if !(self.base_frequency > 0.0) {
            return invalid(format!("base frequency must be > 0, got {}", self.base_frequency));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if !(g.inertia > 0.0) {
                return invalid(format!("generator {i}: inertia must be > 0, got {}", g.inertia));
            }
            if !(g.damping >= 0.0) {
                return invalid(format!("generator {i}: damping must be >= 0, got {}", g.damping));
            }
            if !(g.emf.is_finite() && g.mechanical_power.is_finite()) {
                return invalid(format!("generator {i}: non-finite EMF or mechanical power"));
            }
        }
        if let Some(bus) = self.infinite_bus {
            if !(bus.voltage > 0.0) {
                return invalid(format!("infinite bus voltage must be > 0, got {}", bus.voltage));
            }
        }
        let n = self.node_count();
        let stages = [("prefault", &self.prefault), ("postfault", &self.postfault)]
            .into_iter()
            .chain(self.faults.iter().map(|f| (f.name.as_str(), &f.admittance)));
        for (name, y) in stages {
            check_matrix(name, y, n)?;
        }
        let mut names: Vec<&str> = self.faults.iter().map(|f| f.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate fault name".into());
        }
        Ok(())
    }
}

fn check_matrix(name: &str, y: &Admittance, nodes: usize) -> Result<(), SimError> {
    if y.nrows() != nodes || y.ncols() != nodes {
        return Err(SimError::InvalidModel(format!(
            "matrix {name} is {}x{}, expected {nodes}x{nodes}",
            y.nrows(),
            y.ncols()
        )));
    }
    for i in 0..nodes {
        for j in 0..nodes {
            let z = y[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(SimError::InvalidModel(format!("matrix {name} has a non-finite entry")));
            }
            if (z - y[(j, i)]).norm() > SYMMETRY_TOL {
                return Err(SimError::InvalidModel(format!(
                    "matrix {name} is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

/// Electrical power injected at every node:
/// `Pe_i = Σ_j E_i E_j (G_ij cos(δ_i − δ_j) + B_ij sin(δ_i − δ_j))`.
pub fn node_powers(y: &Admittance, voltages: &[f64], angles: &[f64]) -> Vec<f64> {
    let n = voltages.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let yij = y[(i, j)];
                    let d = angles[i] - angles[j];
                    voltages[i] * voltages[j] * (yij.re * d.cos() + yij.im * d.sin())
                })
                .sum()
        })
        .collect()
}

/// Electrical power of each generator (the infinite bus is dropped).
pub fn electrical_powers(model: &PowerSystemModel, y: &Admittance, generator_angles: &[f64]) -> Vec<f64> {
    let mut p = node_powers(y, &model.node_voltages(), &model.node_angles(generator_angles));
    p.truncate(model.generator_count());
    p
}

/// ∂Pe_i/∂δ_j over all nodes.
pub(crate) fn power_jacobian(y: &Admittance, voltages: &[f64], angles: &[f64]) -> DMatrix<f64> {
    let n = voltages.len();
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let yij = y[(i, j)];
            let d = angles[i] - angles[j];
            let vv = voltages[i] * voltages[j];
            let dij = vv * (yij.re * d.sin() - yij.im * d.cos());
            jac[(i, j)] = dij;
            diag -= dij;
        }
        jac[(i, i)] = diag;
    }
    jac
}
