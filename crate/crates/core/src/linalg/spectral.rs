use super::eigen::tridiagonal_ql;
use super::kernels::{axpy, dot, scaled_column_gram, scaled_row_gram};
use super::matrix::DenseMatrix;
use crate::error::{PccError, Result};

/// Relative asymmetry tolerated by [`sym_eigendecompose`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// The Gram route is used when `d > GRAM_RATIO * N`.
pub const GRAM_RATIO: usize = 4;

/// Eigenvalues in non-increasing order with unit eigenvectors as columns.
///
/// Each eigenvector is signed so that its largest-magnitude coordinate
/// (first one on ties) is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DenseMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DenseMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn into_parts(self) -> (Vec<f64>, DenseMatrix) {
        (self.eigenvalues, self.eigenvectors)
    }

    /// Rank-`k` orthogonal projector `U_k U_kᵀ`.
    pub fn projector(&self, k: usize) -> DenseMatrix {
        projector(&self.eigenvectors.leading_columns(k))
    }

    /// `U Λ Uᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        let mut out = DenseMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let u = self.eigenvectors.column(k);
            for j in 0..n {
                let s = lambda * u[j];
                axpy(s, u, out.column_mut(j));
            }
        }
        out
    }

    /// `max |UᵀU − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.eigenvectors)
    }

    /// `max |A U − U Λ|` for the matrix `a` this decomposition claims to diagonalize.
    pub fn residual(&self, a: &DenseMatrix) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let u = self.eigenvectors.column(k);
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += a.get(i, j) * u[j];
                }
                worst = worst.max((s - self.eigenvalues[k] * u[i]).abs());
            }
        }
        worst
    }
}

/// `B Bᵀ` for a matrix with orthonormal columns.
pub fn projector(basis: &DenseMatrix) -> DenseMatrix {
    let n = basis.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for u in basis.columns() {
        for j in 0..n {
            axpy(u[j], u, out.column_mut(j));
        }
    }
    out
}

/// `max |BᵀB − I|`.
pub fn orthonormality_error(basis: &DenseMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..basis.cols() {
        for j in i..basis.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(basis.column(i), basis.column(j)) - target).abs());
        }
    }
    worst
}

/// Full eigendecomposition of a real symmetric matrix.
pub fn sym_eigendecompose(a: &DenseMatrix) -> Result<SpectralDecomposition> {
    if !a.is_square() {
        return Err(PccError::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(PccError::Domain("matrix has non-finite entries".into()));
    }
    let asym = a.relative_asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(PccError::Shape(format!(
            "matrix is not symmetric (relative asymmetry {asym:.3e})"
        )));
    }
    let (values, vectors) = tridiagonal_ql(a)?;
    Ok(normalize(values, vectors))
}

/// Sorts eigenpairs by descending eigenvalue and applies the sign convention.
fn normalize(values: Vec<f64>, vectors: DenseMatrix) -> SpectralDecomposition {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // Stable: equal eigenvalues keep the solver's order.
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = vectors.select_columns(&order);
    for k in 0..eigenvectors.cols() {
        orient(eigenvectors.column_mut(k));
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

fn orient(u: &mut [f64]) {
    let mut pivot = 0;
    for (i, v) in u.iter().enumerate() {
        if v.abs() > u[pivot].abs() {
            pivot = i;
        }
    }
    if u.get(pivot).is_some_and(|&p| p < 0.0) {
        u.iter_mut().for_each(|v| *v = -*v);
    }
}

/// `(1/N) Z Zᵀ` for a `d × N` data matrix, exactly symmetric.
pub fn gram_or_covariance(z: &DenseMatrix) -> Result<DenseMatrix> {
    let n = z.cols();
    if n == 0 {
        return Err(PccError::Precondition(
            "covariance of an empty dataset".into(),
        ));
    }
    Ok(scaled_row_gram(z, 1.0 / n as f64))
}

/// How [`decompose_covariance`] reaches the spectrum of `(1/N) Z Zᵀ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CovarianceRoute {
    /// Gram route when `d > 4N`, covariance route otherwise.
    #[default]
    Auto,
    /// Decompose the `d × d` covariance directly.
    Covariance,
    /// Decompose the `N × N` Gram matrix `(1/N) Zᵀ Z` and map back.
    Gram,
}

/// Eigendecomposition of the un-centered covariance `(1/N) Z Zᵀ`.
///
/// Eigenvalues are clamped at zero. The full `d`-dimensional basis is
/// returned on both routes; on the Gram route the null space is completed
/// with an orthonormal complement.
pub fn decompose_covariance(
    z: &DenseMatrix,
    route: CovarianceRoute,
) -> Result<SpectralDecomposition> {
    let (d, n) = z.shape();
    if n == 0 {
        return Err(PccError::Precondition(
            "covariance of an empty dataset".into(),
        ));
    }
    let use_gram = match route {
        CovarianceRoute::Auto => d > GRAM_RATIO * n,
        CovarianceRoute::Covariance => false,
        CovarianceRoute::Gram => true,
    };
    let mut decomposition = if use_gram {
        gram_route(z)?
    } else {
        sym_eigendecompose(&gram_or_covariance(z)?)?
    };
    for v in &mut decomposition.eigenvalues {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(decomposition)
}

fn gram_route(z: &DenseMatrix) -> Result<SpectralDecomposition> {
    let (d, n) = z.shape();
    let gram = scaled_column_gram(z, 1.0 / n as f64);
    let small = sym_eigendecompose(&gram)?;
    let top = small.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = top * 1e-12 * n as f64;

    let mut values = Vec::with_capacity(d);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (k, &mu) in small.eigenvalues.iter().enumerate() {
        if mu <= cutoff || basis.len() == d {
            break;
        }
        // u = Z v / ‖Z v‖
        let v = small.eigenvectors.column(k);
        let mut u = vec![0.0; d];
        for (i, &vi) in v.iter().enumerate() {
            axpy(vi, z.column(i), &mut u);
        }
        if orthogonalize_against(&mut u, &basis) {
            values.push(mu);
            basis.push(u);
        }
    }
    // Orthonormal complement from the standard basis.
    let mut axis = 0;
    while basis.len() < d && axis < d {
        let mut u = vec![0.0; d];
        u[axis] = 1.0;
        if orthogonalize_against(&mut u, &basis) {
            values.push(0.0);
            basis.push(u);
        }
        axis += 1;
    }
    if basis.len() != d {
        return Err(PccError::Precondition(
            "could not complete an orthonormal basis on the Gram route".into(),
        ));
    }
    let vectors = DenseMatrix::from_columns(&basis)?;
    Ok(normalize(values, vectors))
}

/// Two passes of Gram-Schmidt then normalization. Returns false when the
/// vector is (numerically) inside the span of `basis`.
fn orthogonalize_against(u: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let norm0 = dot(u, u).sqrt();
    if norm0 == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for b in basis {
            let c = dot(u, b);
            axpy(-c, b, u);
        }
    }
    let norm = dot(u, u).sqrt();
    if norm <= 1e-8 * norm0 {
        return false;
    }
    u.iter_mut().for_each(|v| *v /= norm);
    true
}
