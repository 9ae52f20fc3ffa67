use rand::seq::SliceRandom;

use calseg_core::seed::{derive_seed, rng_from};
use calseg_core::DatasetSplit;

use crate::generate::PhantomError;

/// Shuffles the case ids and partitions them into train/validation/test by
/// the given ratios (largest-remainder rounding; every part with a nonzero
/// ratio receives at least one case). Deterministic given the seed.
pub fn make_splits(
    case_ids: &[String],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<DatasetSplit, PhantomError> {
    let (r0, r1, r2) = ratios;
    if r0 < 0.0 || r1 < 0.0 || r2 < 0.0 {
        return Err(PhantomError::InvalidConfig(
            "split ratios must be non-negative".into(),
        ));
    }
    if ((r0 + r1 + r2) - 1.0).abs() > 1e-9 {
        return Err(PhantomError::InvalidConfig(format!(
            "split ratios must sum to 1, got {}",
            r0 + r1 + r2
        )));
    }
    let n = case_ids.len();
    let nonzero_parts = [r0, r1, r2].iter().filter(|&&r| r > 0.0).count();
    if n < nonzero_parts {
        return Err(PhantomError::InvalidConfig(format!(
            "{n} cases cannot fill {nonzero_parts} split parts"
        )));
    }

    let mut shuffled: Vec<String> = case_ids.to_vec();
    let mut rng = rng_from(derive_seed(seed, &["split"], 0));
    shuffled.shuffle(&mut rng);

    let ratios = [r0, r1, r2];
    let mut sizes = [0usize; 3];
    let mut fractions: Vec<(usize, f64)> = Vec::new();
    let mut assigned = 0usize;
    for (i, &r) in ratios.iter().enumerate() {
        let quota = r * n as f64;
        sizes[i] = quota.floor() as usize;
        assigned += sizes[i];
        fractions.push((i, quota - quota.floor()));
    }
    // Hand out the remainder by largest fractional part; ties by index.
    fractions.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut remaining = n - assigned;
    for &(i, _) in fractions.iter().cycle().take(3 * (remaining + 1)) {
        if remaining == 0 {
            break;
        }
        if ratios[i] > 0.0 {
            sizes[i] += 1;
            remaining -= 1;
        }
    }
    // Every nonzero part must end up non-empty.
    for i in 0..3 {
        if ratios[i] > 0.0 && sizes[i] == 0 {
            let donor = (0..3).max_by_key(|&j| sizes[j]).unwrap();
            sizes[donor] -= 1;
            sizes[i] += 1;
        }
    }

    let mut iter = shuffled.into_iter();
    let train: Vec<String> = iter.by_ref().take(sizes[0]).collect();
    let validation: Vec<String> = iter.by_ref().take(sizes[1]).collect();
    let test: Vec<String> = iter.collect();
    DatasetSplit::new(train, validation, test)
        .map_err(|e| PhantomError::InvalidConfig(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("case_{i:03}")).collect()
    }

    #[test]
    fn hundred_cases_split_60_20_20() {
        let split = make_splits(&ids(100), (0.6, 0.2, 0.2), 9).unwrap();
        assert_eq!(split.train.len(), 60);
        assert_eq!(split.validation.len(), 20);
        assert_eq!(split.test.len(), 20);
    }

    #[test]
    fn all_train_ratio_takes_everything() {
        let split = make_splits(&ids(10), (1.0, 0.0, 0.0), 3).unwrap();
        assert_eq!(split.train.len(), 10);
        assert!(split.validation.is_empty());
        assert!(split.test.is_empty());
    }

    #[test]
    fn fixed_seed_reproduces_the_split() {
        let a = make_splits(&ids(30), (0.6, 0.2, 0.2), 77).unwrap();
        let b = make_splits(&ids(30), (0.6, 0.2, 0.2), 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seed_changes_the_shuffle() {
        let a = make_splits(&ids(30), (0.6, 0.2, 0.2), 1).unwrap();
        let b = make_splits(&ids(30), (0.6, 0.2, 0.2), 2).unwrap();
        assert_ne!(a.train, b.train);
    }

    #[test]
    fn too_few_cases_error() {
        assert!(make_splits(&ids(2), (0.4, 0.3, 0.3), 0).is_err());
    }

    #[test]
    fn bad_ratio_sum_error() {
        assert!(make_splits(&ids(10), (0.5, 0.2, 0.2), 0).is_err());
    }

    #[test]
    fn small_nonzero_parts_get_at_least_one_case() {
        let split = make_splits(&ids(3), (0.98, 0.01, 0.01), 5).unwrap();
        assert_eq!(split.train.len(), 1);
        assert_eq!(split.validation.len(), 1);
        assert_eq!(split.test.len(), 1);
    }
}
