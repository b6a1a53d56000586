//! Seeded, stratified train/test splitting.

use crate::error::{Error, Result};
use crate::rng::Rng;

use super::manifest::Manifest;

/// Default fraction of each class held out for testing.
pub const DEFAULT_TEST_FRACTION: f64 = 0.3;

/// Splits sample indices per class: `floor(test_fraction * count)` samples of
/// each class go to test, chosen by a seeded shuffle. Both index lists keep
/// the original sample order.
///
/// Classes are visited in id order and share one generator seeded with
/// `seed`. Every class in `names` must keep at least one training sample,
/// which fails only for classes with no samples at all.
pub fn split_indices(
    labels: &[usize],
    names: &[String],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::param(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1).max(names.len());
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }
    let mut rng = Rng::new(seed);
    let mut is_test = vec![false; labels.len()];
    for (c, members) in by_class.iter().enumerate() {
        // guard against products like 0.3 * 50 landing a hair below 15
        let n_test = (test_fraction * members.len() as f64 + 1e-9).floor() as usize;
        if n_test >= members.len() {
            let name = names.get(c).cloned().unwrap_or_else(|| c.to_string());
            return Err(Error::Split(name));
        }
        let mut order = members.clone();
        rng.shuffle(&mut order);
        for &i in &order[..n_test] {
            is_test[i] = true;
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| is_test[i]);
    Ok((train, test))
}

/// Stratified split of a manifest into `(train, test)`. Both halves keep the
/// full label list so class ids stay the same.
pub fn split_dataset(
    manifest: &Manifest,
    test_fraction: f64,
    seed: u64,
) -> Result<(Manifest, Manifest)> {
    let (train, test) =
        split_indices(&manifest.label_ids(), &manifest.labels, test_fraction, seed)?;
    let subset = |idx: &[usize]| Manifest {
        records: idx.iter().map(|&i| manifest.records[i].clone()).collect(),
        labels: manifest.labels.clone(),
        base_dir: manifest.base_dir.clone(),
    };
    Ok((subset(&train), subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|c| format!("c{c}")).collect()
    }

    #[test]
    fn half_of_four_is_two() {
        let labels = [0, 0, 0, 0];
        let (train, test) = split_indices(&labels, &names(1), 0.5, 1).unwrap();
        assert_eq!((train.len(), test.len()), (2, 2));
    }

    #[test]
    fn thirty_percent_of_fifty() {
        let labels: Vec<usize> = (0..300).map(|i| i / 50).collect();
        let (train, test) = split_indices(&labels, &names(6), 0.3, 7).unwrap();
        assert_eq!((train.len(), test.len()), (210, 90));
        for c in 0..6 {
            assert_eq!(test.iter().filter(|&&i| labels[i] == c).count(), 15);
        }
    }

    #[test]
    fn deterministic_and_partitioning() {
        let labels: Vec<usize> = (0..40).map(|i| i % 3).collect();
        let a = split_indices(&labels, &names(3), 0.25, 5).unwrap();
        assert_eq!(a, split_indices(&labels, &names(3), 0.25, 5).unwrap());
        let mut all: Vec<usize> = a.0.iter().chain(&a.1).copied().collect();
        all.sort();
        assert_eq!(all, (0..40).collect::<Vec<_>>());
        assert!(a.0.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn class_without_training_samples() {
        let err = split_indices(&[0, 0, 2], &names(3), 0.9, 0).unwrap_err();
        assert!(matches!(&err, Error::Split(name) if name == "c1"), "{err}");
        assert!(split_indices(&[0, 1], &names(2), 1.0, 0).is_err());
    }
}
