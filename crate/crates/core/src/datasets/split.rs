use super::rng::SplitRng;
use super::LabeledDataset;
use crate::error::{PccError, Result};

/// Instance indices of a train/test partition, each list ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Draws `per_class` instances of every class without replacement.
///
/// Classes are visited in label order; within a class the candidate pool
/// is the ascending list of its instance indices and the draw is a partial
/// Fisher-Yates shuffle driven by `rng`. Everything not drawn goes to the
/// test side.
pub fn balanced_split_indices(
    data: &LabeledDataset,
    per_class: usize,
    rng: &mut SplitRng,
) -> Result<SplitIndices> {
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); data.n_classes()];
    for (i, &l) in data.labels().iter().enumerate() {
        pools[l].push(i);
    }
    for (c, pool) in pools.iter().enumerate() {
        if pool.len() < per_class {
            return Err(PccError::Precondition(format!(
                "class {} ({}) has {} instances in {}, {per_class} requested",
                c + 1,
                data.class_names()[c],
                pool.len(),
                data.name()
            )));
        }
    }
    let mut chosen = vec![false; data.len()];
    for pool in &mut pools {
        let n = pool.len();
        for k in 0..per_class {
            let j = k + rng.below((n - k) as u64) as usize;
            pool.swap(k, j);
            chosen[pool[k]] = true;
        }
    }
    let (train, test): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| chosen[i]);
    Ok(SplitIndices { train, test })
}

/// Balanced train set of `per_class` instances per class; the remainder is
/// the test set. Same inputs and seed give the same split.
pub fn balanced_split(
    data: &LabeledDataset,
    per_class: usize,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let idx = balanced_split_indices(data, per_class, &mut SplitRng::new(seed))?;
    Ok((data.subset(&idx.train), data.subset(&idx.test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn toy(labels: Vec<usize>, n_classes: usize) -> LabeledDataset {
        let n = labels.len();
        let x = DenseMatrix::from_col_major(1, n, (0..n).map(|i| i as f64).collect()).unwrap();
        LabeledDataset::new("toy", x, labels, n_classes).unwrap()
    }

    #[test]
    fn exact_class_counts_and_partition() {
        let d = toy((0..30).map(|i| i % 3).collect(), 3);
        let idx = balanced_split_indices(&d, 4, &mut SplitRng::new(1)).unwrap();
        assert_eq!(idx.train.len(), 12);
        assert_eq!(idx.test.len(), 18);
        let train = d.subset(&idx.train);
        assert_eq!(train.class_counts(), vec![4, 4, 4]);
        let mut all: Vec<usize> = idx.train.iter().chain(&idx.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_same_split_other_seed_differs() {
        let d = toy((0..40).map(|i| i % 2).collect(), 2);
        let a = balanced_split_indices(&d, 5, &mut SplitRng::new(3)).unwrap();
        let b = balanced_split_indices(&d, 5, &mut SplitRng::new(3)).unwrap();
        let c = balanced_split_indices(&d, 5, &mut SplitRng::new(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn insufficient_class_names_the_class() {
        let d = toy(vec![0, 0, 0, 1], 2);
        let err = balanced_split(&d, 2, 0).unwrap_err();
        assert!(matches!(err, PccError::Precondition(m) if m.contains("class 2")));
    }
}
