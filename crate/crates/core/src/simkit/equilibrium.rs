use nalgebra::{DMatrix, DVector};

use super::model::{node_powers, power_jacobian, PowerSystemModel};
use super::SimError;

/// Residual bound |Pm_i − Pe_i| an equilibrium must meet.
pub const EQUILIBRIUM_TOL: f64 = 1e-8;
const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 100;

pub const MIN_LOAD_LEVEL: f64 = 0.8;
pub const MAX_LOAD_LEVEL: f64 = 1.3;

/// Prefault steady state: generator angles (radians) and zero speed deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub angles: Vec<f64>,
    pub speeds: Vec<f64>,
}

/// Damped Newton iteration on a square system. `eval` returns the residual
/// and its Jacobian at `x`.
fn newton<F>(mut x: DVector<f64>, eval: F) -> Option<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
{
    let (mut r, mut jac) = eval(&x);
    for _ in 0..NEWTON_MAX_ITER {
        let norm = r.amax();
        if !norm.is_finite() {
            return None;
        }
        if norm < NEWTON_TOL {
            return Some(x);
        }
        let step = jac.clone().lu().solve(&r)?;
        let mut scale = 1.0;
        loop {
            let trial = &x - scale * &step;
            let (tr, tj) = eval(&trial);
            if tr.amax() < norm || scale < 1e-6 {
                x = trial;
                r = tr;
                jac = tj;
                break;
            }
            scale *= 0.5;
        }
    }
    (r.amax() < EQUILIBRIUM_TOL).then_some(x)
}

/// Finds the prefault equilibrium under the prefault matrix.
///
/// With an infinite bus every generator angle is unknown. Without one the
/// first generator is held at zero as the angle reference, the remaining
/// angles are solved, and the reference machine's balance is then checked:
/// its mechanical power must already be consistent with the network.
pub fn solve_equilibrium(model: &PowerSystemModel) -> Result<OperatingPoint, SimError> {
    let g = model.generator_count();
    let fixed = usize::from(model.infinite_bus.is_none());
    let unknown = g - fixed;
    let voltages = model.node_voltages();
    let pm = model.mechanical_powers();

    let full_angles = |x: &DVector<f64>| {
        let mut gen_angles = vec![0.0; g];
        gen_angles[fixed..].copy_from_slice(x.as_slice());
        model.node_angles(&gen_angles)
    };

    let angles = if unknown == 0 {
        vec![0.0; g]
    } else {
        let eval = |x: &DVector<f64>| {
            let a = full_angles(x);
            let pe = node_powers(&model.prefault, &voltages, &a);
            let jac = power_jacobian(&model.prefault, &voltages, &a);
            let r = DVector::from_fn(unknown, |i, _| pe[i + fixed] - pm[i + fixed]);
            let j = DMatrix::from_fn(unknown, unknown, |i, k| jac[(i + fixed, k + fixed)]);
            (r, j)
        };
        let x = newton(DVector::zeros(unknown), eval).ok_or(SimError::NoConvergence)?;
        let mut a = full_angles(&x);
        a.truncate(g);
        a
    };

    let pe = node_powers(&model.prefault, &voltages, &model.node_angles(&angles));
    let worst = (0..g).map(|i| (pm[i] - pe[i]).abs()).fold(0.0, f64::max);
    if !(worst <= EQUILIBRIUM_TOL) {
        return Err(SimError::InfeasibleOperatingPoint(worst));
    }
    Ok(OperatingPoint { angles, speeds: vec![0.0; g] })
}

/// Scales every mechanical power by `level` and restores a prefault
/// equilibrium.
///
/// Against an infinite bus the EMFs are kept and the angles move. Without
/// one, all EMFs are scaled by a common factor `k` so that the
/// constant-impedance loads absorb the changed generation; `k` and the
/// angles are found jointly by Newton's method.
pub fn apply_load_level(model: &PowerSystemModel, level: f64) -> Result<PowerSystemModel, SimError> {
    if !(MIN_LOAD_LEVEL - 1e-12..=MAX_LOAD_LEVEL + 1e-12).contains(&level) {
        return Err(SimError::Domain(format!(
            "load level {level} outside [{MIN_LOAD_LEVEL}, {MAX_LOAD_LEVEL}]"
        )));
    }
    if level == 1.0 {
        return Ok(model.clone());
    }
    let mut scaled = model.clone();
    for gen in &mut scaled.generators {
        gen.mechanical_power *= level;
    }
    if model.infinite_bus.is_some() {
        solve_equilibrium(&scaled).map_err(|_| SimError::NoEquilibrium(level))?;
        return Ok(scaled);
    }

    let base = solve_equilibrium(model).map_err(|_| SimError::NoEquilibrium(level))?;
    let g = model.generator_count();
    let voltages = model.node_voltages();
    let pm = scaled.mechanical_powers();
    // x = [δ_1 .. δ_{G-1}, k]
    let eval = |x: &DVector<f64>| {
        let k = x[g - 1];
        let mut a = vec![0.0; g];
        a[1..].copy_from_slice(&x.as_slice()[..g - 1]);
        let pe = node_powers(&model.prefault, &voltages, &a);
        let jac = power_jacobian(&model.prefault, &voltages, &a);
        let r = DVector::from_fn(g, |i, _| k * k * pe[i] - pm[i]);
        let j = DMatrix::from_fn(g, g, |i, c| if c + 1 < g { k * k * jac[(i, c + 1)] } else { 2.0 * k * pe[i] });
        (r, j)
    };
    let mut x0 = DVector::from_element(g, level.sqrt());
    for i in 1..g {
        x0[i - 1] = base.angles[i] - base.angles[0];
    }
    let x = newton(x0, eval).ok_or(SimError::NoEquilibrium(level))?;
    let k = x[g - 1];
    if !(k > 0.0) {
        return Err(SimError::NoEquilibrium(level));
    }
    for gen in &mut scaled.generators {
        gen.emf *= k;
    }
    solve_equilibrium(&scaled).map_err(|_| SimError::NoEquilibrium(level))?;
    Ok(scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simkit::format::parse_model;
    use crate::simkit::model::electrical_powers;
    use num_complex::Complex64;

    fn smib() -> PowerSystemModel {
        parse_model(include_str!("../../fixtures/smib.model")).unwrap()
    }

    fn wscc9() -> PowerSystemModel {
        parse_model(include_str!("../../fixtures/wscc9.model")).unwrap()
    }

    fn residual(model: &PowerSystemModel, op: &OperatingPoint) -> f64 {
        let pe = electrical_powers(model, &model.prefault, &op.angles);
        model
            .mechanical_powers()
            .iter()
            .zip(&pe)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn smib_equilibrium_is_arcsin() {
        let op = solve_equilibrium(&smib()).unwrap();
        assert!((op.angles[0] - 0.6f64.asin()).abs() < 1e-12);
        assert_eq!(op.speeds, vec![0.0]);
    }

    #[test]
    fn zero_injection_gives_equal_angles() {
        let mut m = wscc9();
        let n = m.node_count();
        for i in 0..n {
            for j in 0..n {
                m.prefault[(i, j)] = Complex64::new(0.0, m.prefault[(i, j)].im);
            }
        }
        for g in &mut m.generators {
            g.mechanical_power = 0.0;
        }
        let op = solve_equilibrium(&m).unwrap();
        for a in &op.angles {
            assert!((a - op.angles[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn wscc9_equilibrium_residual() {
        let m = wscc9();
        let op = solve_equilibrium(&m).unwrap();
        assert!(residual(&m, &op) < 1e-8);
        // Relative angles from the load flow used to build the fixture.
        let rel = (op.angles[1] - op.angles[0]).to_degrees();
        assert!((rel - (19.73104429 - 2.27040414)).abs() < 1e-6, "{rel}");
    }

    #[test]
    fn inconsistent_mechanical_power_is_infeasible() {
        let mut m = wscc9();
        m.generators[0].mechanical_power += 0.1;
        assert!(matches!(solve_equilibrium(&m), Err(SimError::InfeasibleOperatingPoint(_))));
        let mut m = smib();
        m.generators[0].mechanical_power = 1.5;
        assert!(solve_equilibrium(&m).is_err());
    }

    #[test]
    fn load_level_identity() {
        assert_eq!(apply_load_level(&smib(), 1.0).unwrap(), smib());
        assert_eq!(apply_load_level(&wscc9(), 1.0).unwrap(), wscc9());
    }

    #[test]
    fn load_level_on_smib() {
        let base = smib();
        let m = apply_load_level(&base, 1.3).unwrap();
        assert!((m.generators[0].mechanical_power - 0.78).abs() < 1e-15);
        assert_eq!(m.generators[0].emf, base.generators[0].emf);
        let op = solve_equilibrium(&m).unwrap();
        assert!((op.angles[0].to_degrees() - 0.78f64.asin().to_degrees()).abs() < 1e-9);
        assert!((op.angles[0].to_degrees() - 51.26).abs() < 0.01);
        assert_eq!(base.generators[0].mechanical_power, 0.6);
    }

    #[test]
    fn load_level_on_multimachine() {
        let base = wscc9();
        for level in [0.8, 0.9, 1.2, 1.3] {
            let m = apply_load_level(&base, level).unwrap();
            let op = solve_equilibrium(&m).unwrap();
            assert!(residual(&m, &op) < 1e-8, "level {level}");
            for (a, b) in m.generators.iter().zip(&base.generators) {
                assert!((a.mechanical_power - level * b.mechanical_power).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn load_level_out_of_range() {
        assert!(matches!(apply_load_level(&smib(), 0.5), Err(SimError::Domain(_))));
        assert!(matches!(apply_load_level(&smib(), 1.31), Err(SimError::Domain(_))));
    }
}
