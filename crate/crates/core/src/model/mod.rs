//! The trained classifier: a truncated eigenbasis of the un-centered
//! covariance of class-encoded training data.
//!
//! Encoding projects onto the basis, decoding maps the coordinates back,
//! and the predicted class is the largest coordinate of the class block of
//! the reconstruction (lowest class index on ties, scores used raw).

mod io;

pub use io::{load_model, save_model, MODEL_MAGIC};

use crate::datasets::LabeledDataset;
use crate::encoding::{encode_dataset, ClassIndicator, EncodingSpec};
use crate::error::{PccError, Result};
use crate::linalg::{
    decompose_covariance, kernels::axpy, kernels::dot, orthonormality_error, CovarianceRoute,
    DenseMatrix, SpectralDecomposition,
};

/// Tolerance on `|BᵀB − I|` accepted when assembling a model from parts.
pub const BASIS_ORTHONORMALITY_TOLERANCE: f64 = 1e-9;

/// Where a model's training data came from. Only `n_train` survives a
/// save/load round trip.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrainingFingerprint {
    pub dataset: String,
    pub seed: Option<u64>,
    pub n_train: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PccModel {
    spec: EncodingSpec,
    basis: DenseMatrix,
    eigenvalues: Vec<f64>,
    fingerprint: TrainingFingerprint,
}

/// Encoder output: coordinates on the retained components.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    coords: Vec<f64>,
}

impl Projection {
    pub fn new(coords: Vec<f64>) -> Self {
        Projection { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Decoder output `ẑ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    z_hat: Vec<f64>,
    d_x: usize,
}

impl Reconstruction {
    pub fn z_hat(&self) -> &[f64] {
        &self.z_hat
    }

    pub fn feature_part(&self) -> &[f64] {
        &self.z_hat[..self.d_x]
    }

    /// Class scores `ŷ`.
    pub fn class_part(&self) -> &[f64] {
        &self.z_hat[self.d_x..]
    }
}

/// Predicted 1-based label with the raw class scores it was read from.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub scores: Vec<f64>,
}

/// 1-based position of the largest score; the lowest index wins ties.
pub fn argmax_label(scores: &[f64]) -> usize {
    let mut best = 0;
    for (j, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = j;
        }
    }
    best + 1
}

impl PccModel {
    /// Fits on `train` with its classes encoded, keeping `n_e` components.
    pub fn fit(spec: EncodingSpec, train: &LabeledDataset, n_e: usize) -> Result<Self> {
        check_n_e(&spec, n_e)?;
        let decomposition = fit_decomposition(&spec, train)?;
        let fingerprint = TrainingFingerprint {
            dataset: train.name().to_string(),
            seed: None,
            n_train: train.len() as u64,
        };
        PccModel::from_decomposition(spec, &decomposition, n_e, fingerprint)
    }

    /// Keeps the leading `n_e` eigenpairs of a full decomposition.
    pub fn from_decomposition(
        spec: EncodingSpec,
        decomposition: &SpectralDecomposition,
        n_e: usize,
        fingerprint: TrainingFingerprint,
    ) -> Result<Self> {
        check_n_e(&spec, n_e)?;
        if decomposition.dim() != spec.d_z() {
            return Err(PccError::Shape(format!(
                "decomposition of dimension {} for d_z = {}",
                decomposition.dim(),
                spec.d_z()
            )));
        }
        Ok(PccModel {
            spec,
            basis: decomposition.eigenvectors().leading_columns(n_e),
            eigenvalues: decomposition.eigenvalues()[..n_e].to_vec(),
            fingerprint,
        })
    }

    /// Assembles a model from stored parts, checking every invariant.
    pub fn from_parts(
        spec: EncodingSpec,
        basis: DenseMatrix,
        eigenvalues: Vec<f64>,
        fingerprint: TrainingFingerprint,
    ) -> Result<Self> {
        let n_e = basis.cols();
        check_n_e(&spec, n_e)?;
        if basis.rows() != spec.d_z() || eigenvalues.len() != n_e {
            return Err(PccError::Shape(format!(
                "basis {}x{} with {} eigenvalues for d_z = {}",
                basis.rows(),
                basis.cols(),
                eigenvalues.len(),
                spec.d_z()
            )));
        }
        if eigenvalues.iter().any(|&v| !(v >= 0.0 && v.is_finite()))
            || eigenvalues.windows(2).any(|w| w[1] > w[0])
        {
            return Err(PccError::Domain(
                "eigenvalues must be finite, non-negative and non-increasing".into(),
            ));
        }
        let err = orthonormality_error(&basis);
        if !(err <= BASIS_ORTHONORMALITY_TOLERANCE) {
            return Err(PccError::Domain(format!(
                "basis columns are not orthonormal (max deviation {err:.3e})"
            )));
        }
        Ok(PccModel {
            spec,
            basis,
            eigenvalues,
            fingerprint,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.fingerprint.seed = Some(seed);
        self
    }

    pub fn spec(&self) -> &EncodingSpec {
        &self.spec
    }

    pub fn n_e(&self) -> usize {
        self.basis.cols()
    }

    /// `d_z × n_e`, columns `u_1 … u_{n_e}`.
    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn fingerprint(&self) -> &TrainingFingerprint {
        &self.fingerprint
    }

    /// True when the basis spans the whole encoded space (`n_e = d_z`).
    pub fn is_complete(&self) -> bool {
        self.n_e() == self.spec.d_z()
    }

    /// Learned entries: `n_e × d_z`.
    pub fn parameter_count(&self) -> usize {
        self.n_e() * self.spec.d_z()
    }

    /// The same model restricted to its leading `n_e` components.
    pub fn truncated(&self, n_e: usize) -> Result<PccModel> {
        if n_e == 0 || n_e > self.n_e() {
            return Err(PccError::InvalidParameter(format!(
                "cannot truncate {} components to {n_e}",
                self.n_e()
            )));
        }
        Ok(PccModel {
            spec: self.spec,
            basis: self.basis.leading_columns(n_e),
            eigenvalues: self.eigenvalues[..n_e].to_vec(),
            fingerprint: self.fingerprint.clone(),
        })
    }

    fn check_z(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.spec.d_z() {
            return Err(PccError::Shape(format!(
                "vector of length {}, expected d_z = {}",
                z.len(),
                self.spec.d_z()
            )));
        }
        Ok(())
    }

    /// `p = Uᵀ z`
    pub fn encode(&self, z: &[f64]) -> Result<Projection> {
        self.check_z(z)?;
        Ok(Projection {
            coords: self.basis.columns().map(|u| dot(u, z)).collect(),
        })
    }

    /// `ẑ = U p`
    pub fn decode(&self, p: &Projection) -> Result<Reconstruction> {
        if p.len() != self.n_e() {
            return Err(PccError::Shape(format!(
                "projection of length {}, model keeps {} components",
                p.len(),
                self.n_e()
            )));
        }
        let mut z_hat = vec![0.0; self.spec.d_z()];
        for (u, &c) in self.basis.columns().zip(&p.coords) {
            axpy(c, u, &mut z_hat);
        }
        Ok(Reconstruction {
            z_hat,
            d_x: self.spec.d_x(),
        })
    }

    /// Class block of `decode(p)`, accumulated in the same order as
    /// [`PccModel::decode`] so the two agree bit for bit.
    pub fn class_scores(&self, p: &Projection) -> Result<Vec<f64>> {
        if p.len() != self.n_e() {
            return Err(PccError::Shape(format!(
                "projection of length {}, model keeps {} components",
                p.len(),
                self.n_e()
            )));
        }
        let d_x = self.spec.d_x();
        let mut scores = vec![0.0; self.spec.n_classes()];
        for (u, &c) in self.basis.columns().zip(&p.coords) {
            axpy(c, &u[d_x..], &mut scores);
        }
        Ok(scores)
    }

    fn predict_encoded(&self, x: &[f64], label: Option<usize>) -> Result<Prediction> {
        self.spec.check_features(x)?;
        let mut z = vec![0.0; self.spec.d_z()];
        self.spec.encode_into(x, label, &mut z);
        let scores = if self.is_complete() {
            // U Uᵀ = I: the reconstruction is the input itself.
            z[self.spec.d_x()..].to_vec()
        } else {
            self.class_scores(&self.encode(&z)?)?
        };
        Ok(Prediction {
            label: argmax_label(&scores),
            scores,
        })
    }

    /// Class read out of the reconstruction of `x` with an empty class block.
    pub fn predict_class(&self, x: &[f64]) -> Result<Prediction> {
        self.predict_encoded(x, None)
    }

    /// As [`PccModel::predict_class`] but the input carries the α-weighted
    /// true class.
    pub fn predict_with_labels(&self, x: &[f64], y: ClassIndicator) -> Result<Prediction> {
        if y.n_classes() != self.spec.n_classes() {
            return Err(PccError::Domain(format!(
                "class indicator over {} classes for a {}-class model",
                y.n_classes(),
                self.spec.n_classes()
            )));
        }
        self.predict_encoded(x, Some(y.index()))
    }
}

fn check_n_e(spec: &EncodingSpec, n_e: usize) -> Result<()> {
    if n_e == 0 || n_e > spec.d_z() {
        return Err(PccError::InvalidParameter(format!(
            "n_e must lie in [1, {}], got {n_e}",
            spec.d_z()
        )));
    }
    Ok(())
}

/// Full eigendecomposition of the un-centered covariance of the encoded
/// training set (classes included).
pub fn fit_decomposition(
    spec: &EncodingSpec,
    train: &LabeledDataset,
) -> Result<SpectralDecomposition> {
    if train.is_empty() {
        return Err(PccError::Precondition("cannot fit on an empty training set".into()));
    }
    let z = encode_dataset(spec, train, true)?;
    decompose_covariance(&z, CovarianceRoute::Auto)
}

/// Convenience wrapper over [`PccModel::fit`].
pub fn fit(spec: EncodingSpec, train: &LabeledDataset, n_e: usize) -> Result<PccModel> {
    PccModel::fit(spec, train, n_e)
}
