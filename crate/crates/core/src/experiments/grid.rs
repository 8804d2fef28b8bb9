use rayon::prelude::*;

use super::{count_correct, prepare, InputSetKind, PreparedSplit, Protocol};
use crate::datasets::LabeledDataset;
use crate::encoding::{encode_dataset, EncodingSpec};
use crate::error::{PccError, Result};
use crate::model::fit_decomposition;

/// Cells within this distance of the best accuracy count as tied.
const SELECTION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GridMetadata {
    pub dataset: String,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
}

/// Accuracy surfaces over `alphas × n_es`, one per input set, stored
/// row-major (one row per α).
#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub alphas: Vec<f64>,
    pub n_es: Vec<usize>,
    pub accuracy: [Vec<f64>; 3],
    pub metadata: GridMetadata,
}

impl GridResult {
    pub fn get(&self, kind: InputSetKind, alpha_idx: usize, n_e_idx: usize) -> f64 {
        self.accuracy[kind.index()][alpha_idx * self.n_es.len() + n_e_idx]
    }

    pub fn surface(&self, kind: InputSetKind) -> &[f64] {
        &self.accuracy[kind.index()]
    }

    pub fn max(&self, kind: InputSetKind) -> f64 {
        self.surface(kind).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(alpha index, n_e index)` of every cell.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.alphas.len()).flat_map(move |a| (0..self.n_es.len()).map(move |n| (a, n)))
    }
}

/// `0, 0.02, …, 1`.
pub fn default_alphas() -> Vec<f64> {
    (0..=50).map(|i| f64::from(i) / 50.0).collect()
}

/// `1, 2, …, d_z`.
pub fn default_n_es(d_z: usize) -> Vec<usize> {
    (1..=d_z).collect()
}

fn check_grid(alphas: &[f64], n_es: &[usize], d_z: usize) -> Result<()> {
    if alphas.is_empty() || n_es.is_empty() {
        return Err(PccError::InvalidParameter("grid axes must be non-empty".into()));
    }
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(PccError::InvalidParameter("alphas must be strictly ascending".into()));
    }
    if n_es.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PccError::InvalidParameter("n_e values must be strictly ascending".into()));
    }
    if n_es[0] == 0 || n_es[n_es.len() - 1] > d_z {
        return Err(PccError::InvalidParameter(format!("n_e values must lie in [1, {d_z}]")));
    }
    Ok(())
}

/// Splits `data` with `seed` and sweeps the grid on that split.
pub fn grid_search(
    data: &LabeledDataset,
    protocol: &Protocol,
    alphas: &[f64],
    n_es: &[usize],
    seed: u64,
) -> Result<GridResult> {
    grid_search_split(&prepare(data, protocol, seed)?, alphas, n_es)
}

/// One decomposition per α; every `n_e` reads the leading columns of that
/// basis. α values run in parallel and are assembled in order.
pub fn grid_search_split(
    split: &PreparedSplit,
    alphas: &[f64],
    n_es: &[usize],
) -> Result<GridResult> {
    let train = &split.train;
    let d_z = train.dim() + train.n_classes();
    check_grid(alphas, n_es, d_z)?;
    let rows: Vec<[Vec<f64>; 3]> = alphas
        .par_iter()
        .map(|&alpha| alpha_row(split, alpha, n_es))
        .collect::<Result<_>>()?;
    let mut accuracy: [Vec<f64>; 3] = Default::default();
    for row in rows {
        for (acc, r) in accuracy.iter_mut().zip(row) {
            acc.extend(r);
        }
    }
    Ok(GridResult {
        alphas: alphas.to_vec(),
        n_es: n_es.to_vec(),
        accuracy,
        metadata: GridMetadata {
            dataset: train.name().to_string(),
            seed: split.seed,
            n_train: train.len(),
            n_test: split.test.len(),
        },
    })
}

fn alpha_row(split: &PreparedSplit, alpha: f64, n_es: &[usize]) -> Result<[Vec<f64>; 3]> {
    let spec = EncodingSpec::for_dataset(&split.train, alpha)?;
    let basis = fit_decomposition(&spec, &split.train)?.into_parts().1;
    let mut row: [Vec<f64>; 3] = Default::default();
    for kind in InputSetKind::ALL {
        let data = split.set(kind);
        if data.is_empty() {
            return Err(PccError::Precondition(format!("{} set is empty", kind.tag())));
        }
        let z = encode_dataset(&spec, data, kind == InputSetKind::WithLabels)?;
        let hits = count_correct(&basis, spec.d_x(), &z, data.labels(), n_es)?;
        row[kind.index()] = hits.iter().map(|&h| h as f64 / data.len() as f64).collect();
    }
    Ok(row)
}

/// Best cell on `target`: highest accuracy (within 1e-9), then fewest
/// components, then smallest α.
pub fn select_hyperparameters(grid: &GridResult, target: InputSetKind) -> (f64, usize) {
    let best = grid.max(target);
    let mut choice: Option<(usize, usize)> = None;
    for (a, n) in grid.cells() {
        if grid.get(target, a, n) < best - SELECTION_TOLERANCE {
            continue;
        }
        let better = match choice {
            None => true,
            Some((ca, cn)) => (grid.n_es[n], a) < (grid.n_es[cn], ca),
        };
        if better {
            choice = Some((a, n));
        }
    }
    let (a, n) = choice.expect("grid has at least one cell");
    (grid.alphas[a], grid.n_es[n])
}
