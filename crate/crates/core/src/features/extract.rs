use super::FeatureError;
use crate::simkit::Trajectory;

/// Samples per window and their rate, as delivered by the measurement units.
pub const WINDOW_SAMPLES: usize = 9;
pub const SAMPLING_RATE: f64 = 60.0;

const PER_GENERATOR_DYNAMIC: [&str; 4] = ["angle_coi", "speed_coi", "accel_power", "kinetic_energy"];
const SYSTEM_DYNAMIC: [&str; 2] = ["max_angle_diff", "coi_speed"];

/// Feature count for `generators` machines: `9·(4G+2) + 2G`.
pub fn feature_dimension(generators: usize) -> usize {
    WINDOW_SAMPLES * (PER_GENERATOR_DYNAMIC.len() * generators + SYSTEM_DYNAMIC.len()) + 2 * generators
}

/// Names in vector order: one block of `9·4` dynamic features per
/// generator, then `9·2` system aggregates, then two prefault features per
/// generator.
pub fn feature_names(generators: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(feature_dimension(generators));
    for g in 0..generators {
        for m in 0..WINDOW_SAMPLES {
            for q in PER_GENERATOR_DYNAMIC {
                names.push(format!("g{g}_{q}_t{m}"));
            }
        }
    }
    for m in 0..WINDOW_SAMPLES {
        for q in SYSTEM_DYNAMIC {
            names.push(format!("{q}_t{m}"));
        }
    }
    for g in 0..generators {
        names.push(format!("g{g}_pm_prefault"));
        names.push(format!("g{g}_angle_coi_prefault"));
    }
    names
}

/// Grid indices of the measurement window: the first grid point at or after
/// fault clearing, then the grid points nearest to each later 1/60 s tick.
pub fn window_indices(trajectory: &Trajectory) -> Result<Vec<usize>, FeatureError> {
    let h = trajectory.step();
    let t_clear = trajectory.clearing_time;
    let needed = t_clear + WINDOW_SAMPLES as f64 / SAMPLING_RATE;
    let end = trajectory.time.last().copied().unwrap_or(f64::NEG_INFINITY);
    if end + 1e-9 < needed {
        return Err(FeatureError::WindowOutOfRange { needed, available: end });
    }
    let start = (t_clear / h - 1e-9).ceil().max(0.0) as usize;
    let idx: Vec<usize> = (0..WINDOW_SAMPLES)
        .map(|m| start + (m as f64 / (SAMPLING_RATE * h)).round() as usize)
        .collect();
    if idx[WINDOW_SAMPLES - 1] >= trajectory.len() {
        return Err(FeatureError::WindowOutOfRange { needed, available: end });
    }
    Ok(idx)
}

/// Inertia-weighted mean of angle (deg) and speed at sample `t`. An
/// infinite bus has infinite inertia, so it is the center of inertia.
fn center_of_inertia(trajectory: &Trajectory, t: usize) -> (f64, f64) {
    if trajectory.infinite_bus {
        return (0.0, 0.0);
    }
    let total: f64 = trajectory.inertia.iter().sum();
    let mut angle = 0.0;
    let mut speed = 0.0;
    for (g, h) in trajectory.inertia.iter().enumerate() {
        angle += h * trajectory.angle[g][t];
        speed += h * trajectory.speed[g][t];
    }
    (angle / total, speed / total)
}

fn max_separation_at(trajectory: &Trajectory, t: usize) -> f64 {
    let mut lo = if trajectory.infinite_bus { 0.0 } else { f64::INFINITY };
    let mut hi = if trajectory.infinite_bus { 0.0 } else { f64::NEG_INFINITY };
    for series in &trajectory.angle {
        lo = lo.min(series[t]);
        hi = hi.max(series[t]);
    }
    hi - lo
}

/// Builds the feature vector of one trajectory (layout in [`feature_names`]).
pub fn extract_features(trajectory: &Trajectory) -> Result<Vec<f64>, FeatureError> {
    let g_count = trajectory.generator_count();
    if g_count == 0 || trajectory.inertia.len() != g_count {
        return Err(FeatureError::Malformed("trajectory without generators".into()));
    }
    let idx = window_indices(trajectory)?;
    let w0 = trajectory.synchronous_speed;
    let coi: Vec<(f64, f64)> = idx.iter().map(|&t| center_of_inertia(trajectory, t)).collect();

    let mut out = Vec::with_capacity(feature_dimension(g_count));
    for g in 0..g_count {
        let h = trajectory.inertia[g];
        for (&t, &(coi_angle, coi_speed)) in idx.iter().zip(&coi) {
            let rel_speed = trajectory.speed[g][t] - coi_speed;
            out.push(trajectory.angle[g][t] - coi_angle);
            out.push(rel_speed);
            out.push(trajectory.mechanical_power[g][t] - trajectory.electrical_power[g][t]);
            out.push(h * rel_speed * rel_speed / w0);
        }
    }
    for (&t, &(_, coi_speed)) in idx.iter().zip(&coi) {
        out.push(max_separation_at(trajectory, t));
        out.push(coi_speed);
    }
    let (coi_angle0, _) = center_of_inertia(trajectory, 0);
    for g in 0..g_count {
        out.push(trajectory.mechanical_power[g][0]);
        out.push(trajectory.angle[g][0] - coi_angle0);
    }
    if let Some(pos) = out.iter().position(|v| !v.is_finite()) {
        return Err(FeatureError::Malformed(format!("non-finite feature {pos}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simkit::{parse_model, simulate_trajectory, SimulationScenario};

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
    fn dimension_formula() {
        assert_eq!(feature_dimension(1), 56);
        assert_eq!(feature_dimension(10), 398);
        assert_eq!(feature_names(3).len(), feature_dimension(3));
        assert_eq!(feature_names(1)[0], "g0_angle_coi_t0");
    }

    #[test]
    fn window_is_quarter_cycle_aligned() {
        let m = parse_model(include_str!("../../fixtures/smib.model")).unwrap();
        let t = simulate_trajectory(&m, &scenario("terminal", 6.0, 1.0)).unwrap();
        let idx = window_indices(&t).unwrap();
        assert_eq!(idx, (0..9).map(|k| 24 + 4 * k).collect::<Vec<_>>());
        let t = simulate_trajectory(&m, &scenario("terminal", 6.5, 1.0)).unwrap();
        assert_eq!(window_indices(&t).unwrap()[0], 26);
    }

    #[test]
    fn equilibrium_has_no_dynamics() {
        let m = parse_model(include_str!("../../fixtures/wscc9.model")).unwrap();
        let t = simulate_trajectory(&m, &scenario("bus7", 0.0, 0.5)).unwrap();
        let f = extract_features(&t).unwrap();
        let names = feature_names(3);
        for (name, v) in names.iter().zip(&f) {
            if ["speed", "accel_power", "kinetic"].iter().any(|k| name.contains(k)) {
                assert!(v.abs() < 1e-6, "{name} = {v}");
            }
        }
    }

    #[test]
    fn short_trajectory_is_rejected() {
        let m = parse_model(include_str!("../../fixtures/smib.model")).unwrap();
        let t = simulate_trajectory(&m, &scenario("terminal", 6.0, 0.2)).unwrap();
        assert!(matches!(extract_features(&t), Err(FeatureError::WindowOutOfRange { .. })));
    }
}
