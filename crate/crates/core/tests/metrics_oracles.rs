use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsp_core::features::ClassLabel;
use tsp_core::metrics::{accuracy, auc, eta, kappa, ConfusionMatrix};

fn pairwise_auc(scores: &[f64], labels: &[ClassLabel]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0.0;
    for (i, li) in labels.iter().enumerate() {
        for (j, lj) in labels.iter().enumerate() {
            if *li == ClassLabel::Stable && *lj == ClassLabel::Unstable {
                pairs += 1.0;
                credit += match scores[i].partial_cmp(&scores[j]).unwrap() {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Equal => 0.5,
                    std::cmp::Ordering::Less => 0.0,
                };
            }
        }
    }
    credit / pairs
}

fn random_case(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<ClassLabel>) {
    loop {
        let n = rng.gen_range(2..=50);
        // coarse scores force ties
        let scores: Vec<f64> = (0..n).map(|_| (rng.gen_range(-5..=5) as f64) * 0.25).collect();
        let labels: Vec<ClassLabel> =
            (0..n).map(|_| if rng.gen::<bool>() { ClassLabel::Stable } else { ClassLabel::Unstable }).collect();
        if labels.contains(&ClassLabel::Stable) && labels.contains(&ClassLabel::Unstable) {
            return (scores, labels);
        }
    }
}

#[test]
fn auc_equals_pairwise_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let (scores, labels) = random_case(&mut rng);
        assert_eq!(auc(&scores, &labels).unwrap(), pairwise_auc(&scores, &labels));
    }
}

#[test]
fn auc_invariant_under_increasing_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let (scores, labels) = random_case(&mut rng);
        let mapped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() + 7.0).collect();
        assert_eq!(auc(&scores, &labels).unwrap(), auc(&mapped, &labels).unwrap());
    }
}

#[test]
fn kappa_matches_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let cm = ConfusionMatrix {
            tp: rng.gen_range(0..60),
            fn_: rng.gen_range(0..60),
            fp: rng.gen_range(0..60),
            tn: rng.gen_range(1..60),
        };
        let n = cm.total() as f64;
        let po = (cm.tp + cm.tn) as f64 / n;
        let pe = (((cm.tp + cm.fn_) * (cm.tp + cm.fp) + (cm.tn + cm.fp) * (cm.tn + cm.fn_)) as f64) / (n * n);
        let expected = if pe == 1.0 { f64::from(u8::from(po == 1.0)) } else { (po - pe) / (1.0 - pe) };
        assert!((kappa(&cm).unwrap() - expected).abs() < 1e-12);
        assert_eq!(accuracy(&cm).unwrap(), po);
    }
}

#[test]
fn kappa_near_zero_for_independent_predictions() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let trials = 200;
    let mut sum = 0.0;
    for _ in 0..trials {
        let truth: Vec<ClassLabel> =
            (0..400).map(|_| if rng.gen::<bool>() { ClassLabel::Stable } else { ClassLabel::Unstable }).collect();
        let guess: Vec<ClassLabel> =
            (0..400).map(|_| if rng.gen::<bool>() { ClassLabel::Stable } else { ClassLabel::Unstable }).collect();
        sum += kappa(&ConfusionMatrix::from_labels(&truth, &guess).unwrap()).unwrap();
    }
    assert!((sum / trials as f64).abs() < 0.05);
}

#[test]
fn kappa_one_iff_perfect() {
    let perfect = ConfusionMatrix { tp: 7, fn_: 0, fp: 0, tn: 5 };
    assert_eq!(kappa(&perfect).unwrap(), 1.0);
    let off = ConfusionMatrix { tp: 7, fn_: 1, fp: 0, tn: 5 };
    assert!(kappa(&off).unwrap() < 1.0);
    // prediction marginal independent of the truth marginal
    let independent = ConfusionMatrix { tp: 6, fn_: 2, fp: 3, tn: 1 };
    assert!(kappa(&independent).unwrap().abs() < 1e-12);
}

#[test]
fn eta_symmetric_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let v: [f64; 3] = [rng.gen(), rng.gen_range(-1.0..1.0), rng.gen()];
        let e = eta(v[0], v[1], v[2]);
        assert!((e - eta(v[2], v[0], v[1])).abs() < 1e-15);
        assert!((e - eta(v[1], v[2], v[0])).abs() < 1e-15);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo - 1e-15 <= e && e <= hi + 1e-15);
    }
}
