//! Joint feature/class encoding.
//!
//! An instance `(x, y)` becomes `z = ((1 − α)·x, α·y)` of length
//! `d_z = d_x + n_c`. Without a class, the class block is zero.

use crate::datasets::LabeledDataset;
use crate::error::{PccError, Result};
use crate::linalg::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodingSpec {
    d_x: usize,
    n_c: usize,
    alpha: f64,
}

impl EncodingSpec {
    pub fn new(d_x: usize, n_c: usize, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(PccError::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        if d_x == 0 {
            return Err(PccError::InvalidParameter("feature dimension must be at least 1".into()));
        }
        if n_c < 2 {
            return Err(PccError::InvalidParameter(format!(
                "need at least 2 classes, got {n_c}"
            )));
        }
        Ok(EncodingSpec { d_x, n_c, alpha })
    }

    /// Spec matching a dataset's dimensions.
    pub fn for_dataset(data: &LabeledDataset, alpha: f64) -> Result<Self> {
        EncodingSpec::new(data.dim(), data.n_classes(), alpha)
    }

    pub fn d_x(&self) -> usize {
        self.d_x
    }

    pub fn n_classes(&self) -> usize {
        self.n_c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d_z(&self) -> usize {
        self.d_x + self.n_c
    }

    pub fn check_features(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d_x {
            return Err(PccError::Shape(format!(
                "feature vector of length {}, expected {}",
                x.len(),
                self.d_x
            )));
        }
        Ok(())
    }

    /// Writes the encoding of `x` (and class `label`, 0-based) into `out`.
    pub(crate) fn encode_into(&self, x: &[f64], label: Option<usize>, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.d_z());
        let w = 1.0 - self.alpha;
        for (o, v) in out[..self.d_x].iter_mut().zip(x) {
            *o = w * v;
        }
        let class_block = &mut out[self.d_x..];
        class_block.fill(0.0);
        if let Some(l) = label {
            class_block[l] = self.alpha;
        }
    }
}

/// One-hot class vector. Stored 0-based; constructed from and reported as
/// 1-based labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassIndicator {
    n_c: usize,
    index: usize,
}

impl ClassIndicator {
    /// `label` in `1..=n_c`.
    pub fn from_label(label: usize, n_c: usize) -> Result<Self> {
        if label == 0 || label > n_c {
            return Err(PccError::Domain(format!("label {label} outside 1..={n_c}")));
        }
        Ok(ClassIndicator {
            n_c,
            index: label - 1,
        })
    }

    /// `index` in `0..n_c`.
    pub fn from_index(index: usize, n_c: usize) -> Result<Self> {
        ClassIndicator::from_label(index + 1, n_c)
    }

    pub fn n_classes(&self) -> usize {
        self.n_c
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> usize {
        self.index + 1
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n_c];
        v[self.index] = 1.0;
        v
    }
}

/// Encodes a single instance; `y = None` gives the zero class block.
pub fn encode_instance(
    spec: &EncodingSpec,
    x: &[f64],
    y: Option<ClassIndicator>,
) -> Result<Vec<f64>> {
    spec.check_features(x)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(PccError::Domain("feature vector has non-finite entries".into()));
    }
    if let Some(y) = y {
        if y.n_classes() != spec.n_classes() {
            return Err(PccError::Domain(format!(
                "class indicator over {} classes for a {}-class encoding",
                y.n_classes(),
                spec.n_classes()
            )));
        }
    }
    let mut z = vec![0.0; spec.d_z()];
    spec.encode_into(x, y.map(|c| c.index()), &mut z);
    Ok(z)
}

/// `d_z × N` matrix whose columns encode the dataset's instances, with or
/// without their classes.
pub fn encode_dataset(
    spec: &EncodingSpec,
    data: &LabeledDataset,
    with_labels: bool,
) -> Result<DenseMatrix> {
    if data.dim() != spec.d_x() || data.n_classes() != spec.n_classes() {
        return Err(PccError::Shape(format!(
            "dataset has d_x={}, n_c={}; encoding expects d_x={}, n_c={}",
            data.dim(),
            data.n_classes(),
            spec.d_x(),
            spec.n_classes()
        )));
    }
    let d_z = spec.d_z();
    let mut z = DenseMatrix::zeros(d_z, data.len());
    for i in 0..data.len() {
        let label = with_labels.then(|| data.labels()[i]);
        spec.encode_into(data.instance(i), label, z.column_mut(i));
    }
    Ok(z)
}
