use super::equilibrium::{apply_load_level, solve_equilibrium};
use super::model::{electrical_powers, Admittance, PowerSystemModel};
use super::scenario::SimulationScenario;
use super::SimError;

/// |δ| beyond this many degrees is treated as solver blow-up.
pub const OVERFLOW_DEGREES: f64 = 1e6;

const STAGE_EPS: f64 = 1e-9;

/// Rotor angles (rad) and speed deviations (rad/s) of every generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SwingState {
    pub angles: Vec<f64>,
    pub speeds: Vec<f64>,
}

/// Sampled response of one disturbed system. Per-generator series are
/// indexed `[generator][sample]` and share the length of `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub time: Vec<f64>,
    /// Rotor angle δ in degrees.
    pub angle: Vec<Vec<f64>>,
    /// Speed deviation Δω in rad/s.
    pub speed: Vec<Vec<f64>>,
    pub mechanical_power: Vec<Vec<f64>>,
    pub electrical_power: Vec<Vec<f64>>,
    /// Inertia constants echoed from the model.
    pub inertia: Vec<f64>,
    /// ω0 in rad/s.
    pub synchronous_speed: f64,
    /// Whether the system contains an infinite bus at angle zero.
    pub infinite_bus: bool,
    /// Fault clearing instant in seconds.
    pub clearing_time: f64,
    pub scenario: SimulationScenario,
}

impl Trajectory {
    pub fn generator_count(&self) -> usize {
        self.angle.len()
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.scenario.step
    }
}

fn derivative(model: &PowerSystemModel, y: &Admittance, state: &SwingState) -> (Vec<f64>, Vec<f64>) {
    let pe = electrical_powers(model, y, &state.angles);
    let w0 = model.synchronous_speed();
    let accel = model
        .generators
        .iter()
        .zip(&pe)
        .zip(&state.speeds)
        .map(|((g, pe), w)| w0 / (2.0 * g.inertia) * (g.mechanical_power - pe - g.damping * w))
        .collect();
    (state.speeds.clone(), accel)
}

fn offset(state: &SwingState, k: &(Vec<f64>, Vec<f64>), h: f64) -> SwingState {
    SwingState {
        angles: state.angles.iter().zip(&k.0).map(|(a, d)| a + h * d).collect(),
        speeds: state.speeds.iter().zip(&k.1).map(|(a, d)| a + h * d).collect(),
    }
}

/// One classical fourth-order Runge–Kutta step of the swing equations
/// `dδ/dt = Δω`, `(2H/ω0)·dΔω/dt = Pm − Pe − D·Δω` under matrix `y`.
pub fn rk4_step(model: &PowerSystemModel, y: &Admittance, state: &mut SwingState, h: f64) {
    let k1 = derivative(model, y, state);
    let k2 = derivative(model, y, &offset(state, &k1, h / 2.0));
    let k3 = derivative(model, y, &offset(state, &k2, h / 2.0));
    let k4 = derivative(model, y, &offset(state, &k3, h));
    for i in 0..state.angles.len() {
        state.angles[i] += h / 6.0 * (k1.0[i] + 2.0 * k2.0[i] + 2.0 * k3.0[i] + k4.0[i]);
        state.speeds[i] += h / 6.0 * (k1.1[i] + 2.0 * k2.1[i] + 2.0 * k3.1[i] + k4.1[i]);
    }
}

/// Simulates a three-phase fault applied at t = 0 and cleared after
/// `scenario.clearing_cycles` cycles, starting from the prefault equilibrium
/// of the load-adjusted model.
///
/// The during-fault matrix is active on `[0, t_clear)` and the postfault
/// matrix afterwards. A step straddling `t_clear` is split there so the
/// output stays on the uniform grid `k·step`. At `t = 0` the recorded
/// electrical power is the prefault value.
pub fn simulate_trajectory(model: &PowerSystemModel, scenario: &SimulationScenario) -> Result<Trajectory, SimError> {
    let h = scenario.step;
    if !(h > 0.0 && h.is_finite()) {
        return Err(SimError::Domain(format!("integration step must be > 0, got {h}")));
    }
    if !(scenario.clearing_cycles >= 0.0) {
        return Err(SimError::Domain(format!(
            "clearing time must be >= 0 cycles, got {}",
            scenario.clearing_cycles
        )));
    }
    let t_clear = scenario.clearing_cycles / model.base_frequency;
    if !(scenario.horizon.is_finite() && scenario.horizon + STAGE_EPS >= t_clear) {
        return Err(SimError::Domain(format!(
            "horizon {} s shorter than clearing time {t_clear} s",
            scenario.horizon
        )));
    }

    let model = apply_load_level(model, scenario.load_level)?;
    let fault = &model.fault(&scenario.fault)?.admittance;
    let post = &model.postfault;
    let op = solve_equilibrium(&model)?;
    let g = model.generator_count();
    let steps = (scenario.horizon / h).round() as usize;
    let samples = steps + 1;
    let pm = model.mechanical_powers();

    let mut traj = Trajectory {
        time: Vec::with_capacity(samples),
        angle: vec![Vec::with_capacity(samples); g],
        speed: vec![Vec::with_capacity(samples); g],
        mechanical_power: vec![Vec::with_capacity(samples); g],
        electrical_power: vec![Vec::with_capacity(samples); g],
        inertia: model.generators.iter().map(|gen| gen.inertia).collect(),
        synchronous_speed: model.synchronous_speed(),
        infinite_bus: model.infinite_bus.is_some(),
        clearing_time: t_clear,
        scenario: scenario.clone(),
    };

    let clear_index = t_clear / h;
    let mut state = SwingState { angles: op.angles, speeds: op.speeds };
    for k in 0..samples {
        let t = k as f64 * h;
        let stage = if k == 0 {
            &model.prefault
        } else if (k as f64) < clear_index - STAGE_EPS {
            fault
        } else {
            post
        };
        let pe = electrical_powers(&model, stage, &state.angles);
        traj.time.push(t);
        for i in 0..g {
            traj.angle[i].push(state.angles[i].to_degrees());
            traj.speed[i].push(state.speeds[i]);
            traj.mechanical_power[i].push(pm[i]);
            traj.electrical_power[i].push(pe[i]);
        }
        if k == steps {
            break;
        }

        let kf = k as f64;
        if kf + 1.0 <= clear_index + STAGE_EPS {
            rk4_step(&model, fault, &mut state, h);
        } else if kf >= clear_index - STAGE_EPS {
            rk4_step(&model, post, &mut state, h);
        } else {
            let h1 = t_clear - t;
            rk4_step(&model, fault, &mut state, h1);
            rk4_step(&model, post, &mut state, h - h1);
        }
        if let Some(a) = state.angles.iter().find(|a| !(a.to_degrees().abs() <= OVERFLOW_DEGREES)) {
            return Err(SimError::NumericOverflow { time: t + h, angle: a.to_degrees() });
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simkit::format::parse_model;

    fn smib() -> PowerSystemModel {
        parse_model(include_str!("../../fixtures/smib.model")).unwrap()
    }

    fn wscc9() -> PowerSystemModel {
        parse_model(include_str!("../../fixtures/wscc9.model")).unwrap()
    }

    fn scenario(fault: &str, cycles: f64, horizon: f64) -> SimulationScenario {
        SimulationScenario {
            fault: fault.into(),
            clearing_cycles: cycles,
            load_level: 1.0,
            step: 1.0 / 240.0,
            horizon,
            seed: 0,
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        for (m, fault) in [(smib(), "terminal"), (wscc9(), "bus7")] {
            let t = simulate_trajectory(&m, &scenario(fault, 0.0, 1.0)).unwrap();
            assert_eq!(t.len(), 241);
            for series in &t.angle {
                for a in series {
                    assert!((a - series[0]).abs() < 1e-6);
                }
            }
            for i in 0..t.generator_count() {
                assert!((t.mechanical_power[i][0] - t.electrical_power[i][0]).abs() <= 1e-6);
                assert_eq!(t.speed[i].len(), t.time.len());
            }
        }
    }

    #[test]
    fn sustained_fault_runs_away() {
        let t = simulate_trajectory(&smib(), &scenario("terminal", 60.0, 1.0)).unwrap();
        let a = &t.angle[0];
        assert!(a.windows(2).all(|w| w[1] > w[0]));
        assert!(a.last().unwrap() - a[0] > 360.0);
    }

    #[test]
    fn state_is_continuous_across_clearing() {
        // 6.5 cycles puts the clearing instant mid-step
        let t = simulate_trajectory(&smib(), &scenario("near", 6.5, 0.5)).unwrap();
        let k = (t.clearing_time / t.step()).ceil() as usize;
        let jump = |s: &Vec<f64>| (s[k] - s[k - 1]).abs();
        let typical = |s: &Vec<f64>| (s[k - 1] - s[k - 2]).abs();
        assert!(jump(&t.angle[0]) < 2.0 * typical(&t.angle[0]) + 1e-9);
        assert!(jump(&t.speed[0]) < 2.0 * typical(&t.speed[0]) + 1e-9);
        // Pe does jump between fault and postfault network
        assert!(jump(&t.electrical_power[0]) > 0.3);
    }

    #[test]
    fn lossless_energy_is_conserved() {
        // Smib, D = 0: W = H Δω²/ω0 − Pm δ − Pmax cos δ is constant off-fault.
        let m = smib();
        let op = solve_equilibrium(&m).unwrap();
        let mut s = SwingState { angles: op.angles, speeds: op.speeds };
        let h = 1.0 / 960.0;
        let fault = m.fault("near").unwrap().admittance.clone();
        for _ in 0..48 {
            rk4_step(&m, &fault, &mut s, h);
        }
        let g = &m.generators[0];
        let w0 = m.synchronous_speed();
        let energy = |s: &SwingState| {
            g.inertia * s.speeds[0].powi(2) / w0 - g.mechanical_power * s.angles[0] - s.angles[0].cos()
        };
        let e0 = energy(&s);
        assert!(s.speeds[0].abs() > 1.0);
        for _ in 0..960 {
            rk4_step(&m, &m.prefault, &mut s, h);
        }
        assert!((energy(&s) - e0).abs() < 1e-4);
    }

    #[test]
    fn deterministic() {
        let sc = scenario("bus9", 7.5, 1.0);
        let a = simulate_trajectory(&wscc9(), &sc).unwrap();
        let b = simulate_trajectory(&wscc9(), &sc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_scenarios() {
        let m = smib();
        let mut sc = scenario("terminal", 6.0, 1.0);
        sc.step = 0.0;
        assert!(matches!(simulate_trajectory(&m, &sc), Err(SimError::Domain(_))));
        assert!(matches!(
            simulate_trajectory(&m, &scenario("terminal", 6.0, 0.05)),
            Err(SimError::Domain(_))
        ));
        assert!(matches!(
            simulate_trajectory(&m, &scenario("nowhere", 6.0, 1.0)),
            Err(SimError::UnknownFault(_))
        ));
    }

    #[test]
    fn overflow_guard_trips() {
        let mut m = smib();
        m.generators[0].inertia = 1e-4;
        let err = simulate_trajectory(&m, &scenario("terminal", 600.0, 10.0)).unwrap_err();
        assert!(matches!(err, SimError::NumericOverflow { .. }), "{err:?}");
    }
}
