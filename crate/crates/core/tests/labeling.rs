use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsp_core::features::{label_trajectory, max_angle_separation, ClassLabel};
use tsp_core::simkit::{SimulationScenario, Trajectory};

fn random_trajectory(rng: &mut ChaCha8Rng) -> Trajectory {
    let gens = rng.gen_range(1..6);
    let len = rng.gen_range(1..80);
    let infinite_bus = rng.gen::<bool>();
    let spread = [50.0, 200.0, 400.0][rng.gen_range(0..3)];
    let angle = (0..gens)
        .map(|_| (0..len).map(|_| rng.gen_range(-spread..spread)).collect())
        .collect();
    let zeros = vec![vec![0.0; len]; gens];
    Trajectory {
        time: (0..len).map(|k| k as f64 / 240.0).collect(),
        angle,
        speed: zeros.clone(),
        mechanical_power: zeros.clone(),
        electrical_power: zeros,
        inertia: vec![1.0; gens],
        synchronous_speed: 376.99111843077515,
        infinite_bus,
        clearing_time: 0.0,
        scenario: SimulationScenario {
            fault: "f".into(),
            clearing_cycles: 5.0,
            load_level: 1.0,
            step: 1.0 / 240.0,
            horizon: 1.0,
            seed: 0,
        },
    }
}

/// Every pair of machines (and the infinite bus) at every sample.
fn brute_force(t: &Trajectory) -> f64 {
    let mut series: Vec<Vec<f64>> = t.angle.clone();
    if t.infinite_bus {
        series.push(vec![0.0; t.len()]);
    }
    let mut worst: f64 = 0.0;
    for k in 0..t.len() {
        for a in &series {
            for b in &series {
                worst = worst.max(a[k] - b[k]);
            }
        }
    }
    worst
}

#[test]
fn matches_pairwise_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut seen = [0usize; 2];
    for _ in 0..200 {
        let t = random_trajectory(&mut rng);
        let expected = brute_force(&t);
        assert_eq!(max_angle_separation(&t).unwrap(), expected);
        let label = label_trajectory(&t).unwrap();
        assert_eq!(label == ClassLabel::Stable, expected < 360.0);
        seen[usize::from(label == ClassLabel::Stable)] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0);
}
