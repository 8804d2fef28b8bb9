//! Class-encoded principal component classification.
//!
//! Feature vectors are concatenated with an α-weighted one-hot class
//! indicator, an un-centered PCA is computed over the joint space, and
//! classes are read back from the class block of the truncated
//! reconstruction. The crate also carries the dataset loaders and the
//! experiment harness (input sets, hyperparameter grids, multi-run
//! statistics, MNIST benchmark) used to evaluate the classifier.

pub mod cli;
pub mod datasets;
pub mod encoding;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;

pub use datasets::LabeledDataset;
pub use encoding::{ClassIndicator, EncodingSpec};
pub use error::{PccError, Result};
pub use linalg::{DenseMatrix, SpectralDecomposition};
pub use model::{PccModel, Projection, Reconstruction};
