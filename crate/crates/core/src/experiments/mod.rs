//! Evaluation protocol: balanced splits, the three input sets, accuracy
//! grids over `(α, n_e)`, repeated runs and the full-MNIST benchmark.

mod bench;
mod grid;
mod multi;
mod report;

pub use bench::{
    benchmark_mnist_full, BenchmarkConfig, BenchmarkReport, BenchmarkRow, DEFAULT_BENCHMARK_CONFIGS,
};
pub use grid::{
    default_alphas, default_n_es, grid_search, grid_search_split, select_hyperparameters,
    GridMetadata, GridResult,
};
pub use multi::{run_multi, MultiRunSummary};
pub use report::{
    emit_heatmap, emit_projections, parse_heatmap, render_heatmap, render_projections,
};

use rayon::prelude::*;

use crate::datasets::{
    balanced_split_indices, LabeledDataset, RescaleScope, Rescaler, SplitRng,
};
use crate::encoding::encode_dataset;
use crate::error::{PccError, Result};
use crate::linalg::kernels::axpy;
use crate::linalg::{transpose_matmul, DenseMatrix};
use crate::model::{argmax_label, PccModel};

/// The three evaluation sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputSetKind {
    /// Training instances with their classes encoded.
    WithLabels,
    /// Training instances with an empty class block.
    TrainNoLabels,
    /// Held-out instances with an empty class block.
    TestNoLabels,
}

impl InputSetKind {
    pub const ALL: [InputSetKind; 3] = [
        InputSetKind::WithLabels,
        InputSetKind::TrainNoLabels,
        InputSetKind::TestNoLabels,
    ];

    pub fn index(self) -> usize {
        match self {
            InputSetKind::WithLabels => 0,
            InputSetKind::TrainNoLabels => 1,
            InputSetKind::TestNoLabels => 2,
        }
    }

    /// Name used in emitted files.
    pub fn tag(self) -> &'static str {
        match self {
            InputSetKind::WithLabels => "with_labels",
            InputSetKind::TrainNoLabels => "train_no_labels",
            InputSetKind::TestNoLabels => "test_no_labels",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        InputSetKind::ALL.into_iter().find(|k| k.tag() == tag)
    }

    fn uses_labels(self) -> bool {
        self == InputSetKind::WithLabels
    }
}

/// Accuracy on each input set, indexed by [`InputSetKind::index`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accuracies(pub [f64; 3]);

impl Accuracies {
    pub fn get(&self, kind: InputSetKind) -> f64 {
        self.0[kind.index()]
    }
}

/// How a dataset is turned into a train/test pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Protocol {
    /// Training instances drawn per class.
    pub per_class: usize,
    /// When set, the test set is this many instances per class drawn from
    /// the remainder; otherwise the whole remainder.
    pub test_per_class: Option<usize>,
    /// Per-dimension max rescaling; `None` keeps features as loaded.
    pub rescale: Option<RescaleScope>,
}

impl Protocol {
    pub fn new(per_class: usize) -> Self {
        Protocol {
            per_class,
            test_per_class: None,
            rescale: Some(RescaleScope::TrainOnly),
        }
    }
}

/// A seeded train/test split ready for fitting.
#[derive(Clone, Debug)]
pub struct PreparedSplit {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub rescaler: Rescaler,
    pub seed: u64,
}

impl PreparedSplit {
    /// Instances of the given evaluation set.
    pub fn set(&self, kind: InputSetKind) -> &LabeledDataset {
        match kind {
            InputSetKind::WithLabels | InputSetKind::TrainNoLabels => &self.train,
            InputSetKind::TestNoLabels => &self.test,
        }
    }
}

/// Splits `data` under `protocol`. One generator seeded with `seed` drives
/// the training draw and then, if requested, the test draw.
pub fn prepare(data: &LabeledDataset, protocol: &Protocol, seed: u64) -> Result<PreparedSplit> {
    let mut rng = SplitRng::new(seed);
    let (data, whole) = match protocol.rescale {
        Some(RescaleScope::WholeDataset) => {
            let r = Rescaler::fit(data.features())?;
            (r.apply(data)?, Some(r))
        }
        _ => (data.clone(), None),
    };
    let idx = balanced_split_indices(&data, protocol.per_class, &mut rng)?;
    let train = data.subset(&idx.train);
    let mut test = data.subset(&idx.test);
    if let Some(k) = protocol.test_per_class {
        let inner = balanced_split_indices(&test, k, &mut rng)?;
        test = test.subset(&inner.train);
    }
    let (train, test, rescaler) = match (protocol.rescale, whole) {
        (_, Some(r)) => (train, test, r),
        (Some(RescaleScope::TrainOnly), None) => {
            let r = Rescaler::fit(train.features())?;
            (r.apply(&train)?, r.apply(&test)?, r)
        }
        (_, None) => {
            let r = Rescaler::identity(data.dim());
            (train, test, r)
        }
    };
    Ok(PreparedSplit {
        train,
        test,
        rescaler,
        seed,
    })
}

/// Correct predictions on `data` after each checkpoint number of
/// components. `basis` holds the leading components (at least the largest
/// checkpoint); `d_z` is the full encoded dimension.
///
/// Scores are accumulated component by component in the order
/// [`PccModel::class_scores`] uses, and a checkpoint at `d_z` reads the
/// class block directly as [`PccModel::predict_class`] does, so every
/// count agrees with per-instance prediction.
pub(crate) fn count_correct(
    basis: &DenseMatrix,
    d_x: usize,
    z: &DenseMatrix,
    labels: &[usize],
    checkpoints: &[usize],
) -> Result<Vec<usize>> {
    let d_z = basis.rows();
    let n_c = d_z - d_x;
    let m = checkpoints.last().copied().unwrap_or(0);
    if m > basis.cols() {
        return Err(PccError::Shape(format!(
            "checkpoint {m} beyond the {} available components",
            basis.cols()
        )));
    }
    let used = basis.leading_columns(m.min(d_z));
    let p = transpose_matmul(&used, z)?;
    let tally = |j: usize| -> Vec<usize> {
        let pj = p.column(j);
        let truth = labels[j] + 1;
        let mut hits = vec![0; checkpoints.len()];
        let mut scores = vec![0.0; n_c];
        let mut done = 0;
        for (c, &k) in checkpoints.iter().enumerate() {
            while done < k {
                axpy(pj[done], &used.column(done)[d_x..], &mut scores);
                done += 1;
            }
            let label = if k == d_z {
                argmax_label(&z.column(j)[d_x..])
            } else {
                argmax_label(&scores)
            };
            hits[c] = usize::from(label == truth);
        }
        hits
    };
    Ok((0..z.cols())
        .into_par_iter()
        .map(tally)
        .reduce(
            || vec![0; checkpoints.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        ))
}

/// Fraction of `data` whose predicted label matches its true label.
/// `WithLabels` encodes each instance's class, the other kinds leave the
/// class block empty.
pub fn evaluate(model: &PccModel, data: &LabeledDataset, kind: InputSetKind) -> Result<f64> {
    if data.is_empty() {
        return Err(PccError::Precondition(format!("{} is empty", data.name())));
    }
    let z = encode_dataset(model.spec(), data, kind.uses_labels())?;
    let hits = count_correct(model.basis(), model.spec().d_x(), &z, data.labels(), &[model.n_e()])?;
    Ok(hits[0] as f64 / data.len() as f64)
}

/// Accuracies on all three input sets of a split.
pub fn evaluate_split(model: &PccModel, split: &PreparedSplit) -> Result<Accuracies> {
    let mut out = [0.0; 3];
    for kind in InputSetKind::ALL {
        out[kind.index()] = evaluate(model, split.set(kind), kind)?;
    }
    Ok(Accuracies(out))
}

/// Predicted 1-based label of every instance.
pub fn predict_labels(model: &PccModel, data: &LabeledDataset, kind: InputSetKind) -> Result<Vec<usize>> {
    (0..data.len())
        .map(|i| {
            let x = data.instance(i);
            let p = if kind.uses_labels() {
                let y = crate::encoding::ClassIndicator::from_index(data.labels()[i], data.n_classes())?;
                model.predict_with_labels(x, y)?
            } else {
                model.predict_class(x)?
            };
            Ok(p.label)
        })
        .collect()
}
