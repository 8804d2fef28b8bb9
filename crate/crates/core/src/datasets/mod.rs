//! Labeled datasets: loaders for IDX binaries and delimited tables,
//! per-dimension max rescaling, and seeded balanced splits.

mod idx;
mod rescale;
mod rng;
mod split;
mod table;

pub use idx::{load_idx, load_mnist, parse_idx_images, parse_idx_labels, MnistPart};
pub use rescale::{apply_rescaler, fit_rescaler, RescaleScope, Rescaler};
pub use rng::SplitRng;
pub use split::{balanced_split, balanced_split_indices, SplitIndices};
pub use table::{load_table, parse_table, LabelColumn, TableFormat};

use crate::error::{PccError, Result};
use crate::linalg::DenseMatrix;

/// Feature matrix (`d_x × N`, one instance per column) with class labels.
///
/// Labels are stored 0-based; every text file and report uses 1-based
/// labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    name: String,
    features: DenseMatrix,
    labels: Vec<usize>,
    n_classes: usize,
    class_names: Vec<String>,
}

impl LabeledDataset {
    /// `labels` are 0-based class indices.
    pub fn new(
        name: impl Into<String>,
        features: DenseMatrix,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        let class_names = (1..=n_classes).map(|c| c.to_string()).collect();
        LabeledDataset::with_class_names(name, features, labels, class_names)
    }

    pub fn with_class_names(
        name: impl Into<String>,
        features: DenseMatrix,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_classes = class_names.len();
        if labels.len() != features.cols() {
            return Err(PccError::Shape(format!(
                "{} labels for {} instances",
                labels.len(),
                features.cols()
            )));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= n_classes) {
            return Err(PccError::Domain(format!(
                "instance {i} has label {} outside 1..={n_classes}",
                l + 1
            )));
        }
        Ok(LabeledDataset {
            name: name.into(),
            features,
            labels,
            n_classes,
            class_names,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    /// 0-based labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Original class identifiers, indexed by 0-based label.
    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Feature dimension `d_x`.
    pub fn dim(&self) -> usize {
        self.features.rows()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn instance(&self, i: usize) -> &[f64] {
        self.features.column(i)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Instances at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            name: self.name.clone(),
            features: self.features.select_columns(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            class_names: self.class_names.clone(),
        }
    }

    pub(crate) fn with_features(&self, features: DenseMatrix) -> LabeledDataset {
        debug_assert_eq!(features.cols(), self.len());
        LabeledDataset {
            features,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_labels() {
        let x = DenseMatrix::zeros(2, 2);
        let err = LabeledDataset::new("t", x, vec![0, 3], 2).unwrap_err();
        assert!(matches!(err, PccError::Domain(m) if m.contains("label 4")));
    }

    #[test]
    fn subset_and_counts() {
        let x = DenseMatrix::from_rows(&[&[1.0, 2.0, 3.0]]).unwrap();
        let d = LabeledDataset::new("t", x, vec![1, 0, 1], 2).unwrap();
        assert_eq!(d.class_counts(), vec![1, 2]);
        let s = d.subset(&[2, 1]);
        assert_eq!(s.labels(), &[1, 0]);
        assert_eq!(s.instance(0), &[3.0]);
    }
}
