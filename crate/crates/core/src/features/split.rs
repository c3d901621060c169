use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::label::ClassLabel;
use super::FeatureError;
use crate::rng::{stream, Purpose};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndex {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Indices of each class, each list shuffled by its own stream.
fn shuffled_classes(labels: &[ClassLabel], seed: u64, purpose: Purpose) -> [Vec<usize>; 2] {
    let mut classes = [Vec::new(), Vec::new()];
    for (i, l) in labels.iter().enumerate() {
        classes[usize::from(*l == ClassLabel::Unstable)].push(i);
    }
    for (c, idx) in classes.iter_mut().enumerate() {
        idx.shuffle(&mut stream(seed, purpose, c, 0));
    }
    classes
}

/// Random stratified train/test split. The training side gets
/// `round(fraction·N)` rows, allotted to the classes by largest remainder,
/// with every class of two or more members present on both sides.
pub fn split_train_test(labels: &[ClassLabel], fraction: f64, seed: u64) -> Result<SplitIndex, FeatureError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(FeatureError::Domain(format!("train fraction must be in (0, 1), got {fraction}")));
    }
    let n = labels.len();
    if n < 2 {
        return Err(FeatureError::TooFewSamples(format!("cannot split {n} samples")));
    }
    let total_train = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
    let classes = shuffled_classes(labels, seed, Purpose::Split);

    let ideal: Vec<f64> = classes
        .iter()
        .map(|c| total_train as f64 * c.len() as f64 / n as f64)
        .collect();
    let mut quota: Vec<usize> = ideal.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = vec![0, 1];
    order.sort_by(|&a, &b| (ideal[b] - ideal[b].floor()).total_cmp(&(ideal[a] - ideal[a].floor())));
    let mut left = total_train - quota.iter().sum::<usize>();
    for &c in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if quota[c] < classes[c].len() {
            quota[c] += 1;
            left -= 1;
        }
    }

    // Both sides need a member of every class that has at least two.
    let lower = |c: usize| usize::from(classes[c].len() >= 2);
    let upper = |c: usize| classes[c].len() - usize::from(classes[c].len() >= 2);
    for c in 0..2 {
        let other = 1 - c;
        if quota[c] < lower(c) {
            if quota[other] > lower(other) {
                quota[c] += 1;
                quota[other] -= 1;
            } else {
                return Err(FeatureError::TooFewSamples("stratified split impossible".into()));
            }
        }
        if quota[c] > upper(c) {
            if quota[other] < upper(other) {
                quota[c] -= 1;
                quota[other] += 1;
            } else {
                return Err(FeatureError::TooFewSamples("stratified split impossible".into()));
            }
        }
    }

    let mut train = Vec::with_capacity(total_train);
    let mut test = Vec::with_capacity(n - total_train);
    for (c, idx) in classes.iter().enumerate() {
        train.extend_from_slice(&idx[..quota[c]]);
        test.extend_from_slice(&idx[quota[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndex { train, test, seed })
}

/// Stratified k-fold partition of `0..labels.len()`. Fold sizes differ by
/// at most one; positions refer to `labels`.
pub fn kfold_partition(labels: &[ClassLabel], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, FeatureError> {
    if k < 2 {
        return Err(FeatureError::Domain(format!("k-fold needs k >= 2, got {k}")));
    }
    if labels.len() < k {
        return Err(FeatureError::Domain(format!("{} samples cannot fill {k} folds", labels.len())));
    }
    let classes = shuffled_classes(labels, seed, Purpose::Folds);
    let mut folds = vec![Vec::with_capacity(labels.len() / k + 1); k];
    for (pos, &i) in classes.iter().flatten().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ClassLabel::{Stable as S, Unstable as U};

    fn labels(pos: usize, neg: usize) -> Vec<ClassLabel> {
        let mut v = vec![S; pos];
        v.extend(vec![U; neg]);
        v
    }

    #[test]
    fn paper_scale_split() {
        let l = labels(2000, 1300);
        let s = split_train_test(&l, 2200.0 / 3300.0, 1).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (2200, 1100));
    }

    #[test]
    fn deterministic() {
        let l = labels(5, 5);
        assert_eq!(split_train_test(&l, 0.5, 3).unwrap(), split_train_test(&l, 0.5, 3).unwrap());
        assert_ne!(split_train_test(&l, 0.5, 3).unwrap().train, split_train_test(&l, 0.5, 4).unwrap().train);
    }

    #[test]
    fn both_classes_on_both_sides() {
        let l = labels(5, 5);
        for seed in 0..50 {
            let s = split_train_test(&l, 0.8, seed).unwrap();
            assert_eq!(s.train.len(), 8);
            for side in [&s.train, &s.test] {
                assert!(side.iter().any(|&i| l[i] == S));
                assert!(side.iter().any(|&i| l[i] == U));
            }
        }
        // Skewed 18 vs 2 at 0.9: proportional quotas would put both minority
        // rows in training.
        let l = labels(18, 2);
        let s = split_train_test(&l, 0.9, 0).unwrap();
        assert_eq!(s.train.len(), 18);
        assert!(s.test.iter().any(|&i| l[i] == U));
        assert!(split_train_test(&labels(9, 2), 0.9, 0).is_err());
    }

    #[test]
    fn split_errors() {
        assert!(matches!(split_train_test(&labels(1, 0), 0.5, 0), Err(FeatureError::TooFewSamples(_))));
        assert!(matches!(split_train_test(&labels(2, 2), 0.0, 0), Err(FeatureError::Domain(_))));
        assert!(matches!(split_train_test(&labels(2, 2), 1.0, 0), Err(FeatureError::Domain(_))));
        // 2+2 with one training row cannot put both classes on both sides.
        assert!(matches!(split_train_test(&labels(2, 2), 0.2, 0), Err(FeatureError::TooFewSamples(_))));
    }

    #[test]
    fn fold_sizes() {
        let f = kfold_partition(&labels(5, 5), 5, 0).unwrap();
        assert!(f.iter().all(|f| f.len() == 2));
        let mut sizes: Vec<usize> = kfold_partition(&labels(6, 5), 5, 0).unwrap().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
        assert!(kfold_partition(&labels(2, 2), 5, 0).is_err());
        assert!(kfold_partition(&labels(2, 2), 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn exact_partitions(pos in 0usize..40, neg in 0usize..40, k in 2usize..8, frac in 0.05f64..0.95, seed: u64) {
            let l = labels(pos, neg);
            if l.len() >= k {
                let folds = kfold_partition(&l, k, seed).unwrap();
                let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..l.len()).collect::<Vec<_>>());
                let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
                prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            }
            if let Ok(s) = split_train_test(&l, frac, seed) {
                let mut all = s.train.clone();
                all.extend(&s.test);
                all.sort_unstable();
                prop_assert_eq!(all, (0..l.len()).collect::<Vec<_>>());
            }
        }
    }
}
