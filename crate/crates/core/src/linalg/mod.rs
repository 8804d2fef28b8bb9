//! Dense linear algebra: column-major matrices, inner-product kernels and
//! the symmetric eigensolver.

mod eigen;
pub mod kernels;
mod matrix;
mod spectral;

pub use eigen::MAX_SWEEPS_PER_EIGENVALUE;
pub use kernels::{dot, transpose_matmul};
pub use matrix::{matmul, DenseMatrix};
pub use spectral::{
    decompose_covariance, gram_or_covariance, orthonormality_error, projector,
    sym_eigendecompose, CovarianceRoute, SpectralDecomposition, GRAM_RATIO, SYMMETRY_TOLERANCE,
};
