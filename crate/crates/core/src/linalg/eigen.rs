//! Householder tridiagonalization followed by implicit-shift QL.
//!
//! This is the classic EISPACK `tred2`/`tql2` pair, adapted to column-major
//! storage so that the inner loops (Householder updates and Givens
//! rotations of eigenvector columns) walk contiguous memory.

use super::matrix::DenseMatrix;
use crate::error::{PccError, Result};

/// Maximum QL iterations spent on a single eigenvalue.
pub const MAX_SWEEPS_PER_EIGENVALUE: usize = 64;

/// Unsorted eigenpairs of a symmetric matrix. Eigenvectors are the columns
/// of the returned matrix.
pub(crate) fn tridiagonal_ql(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = a.rows();
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return Ok((d, v));
    }
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((d, v))
}

// Index helper: V[row][col] in column-major storage.
macro_rules! at {
    ($v:expr, $n:expr, $r:expr, $c:expr) => {
        $v[($c) * $n + ($r)]
    };
}

fn tred2(vm: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    let v = vm.as_mut_slice();

    for j in 0..n {
        d[j] = at!(v, n, n - 1, j);
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = at!(v, n, i - 1, j);
                at!(v, n, i, j) = 0.0;
                at!(v, n, j, i) = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                at!(v, n, j, i) = f;
                g = e[j] + at!(v, n, j, j) * f;
                // column j, rows j+1..i-1 are contiguous
                let col = &v[j * n..j * n + i];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut v[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = at!(v, n, i - 1, j);
                at!(v, n, i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate the transformations.
    for i in 0..n - 1 {
        at!(v, n, n - 1, i) = at!(v, n, i, i);
        at!(v, n, i, i) = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = at!(v, n, k, i + 1) / h;
            }
            for j in 0..=i {
                let (left, right) = v.split_at_mut((i + 1) * n);
                let ci1 = &right[..=i];
                let cj = &mut left[j * n..j * n + i + 1];
                let mut g = 0.0;
                for k in 0..=i {
                    g += ci1[k] * cj[k];
                }
                for k in 0..=i {
                    cj[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            at!(v, n, k, i + 1) = 0.0;
        }
    }
    for j in 0..n {
        d[j] = at!(v, n, n - 1, j);
        at!(v, n, n - 1, j) = 0.0;
    }
    at!(v, n, n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

fn tql2(vm: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    let v = vm.as_mut_slice();

    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] == 0 guarantees m < n.

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(PccError::Convergence {
                        index: l,
                        iterations: MAX_SWEEPS_PER_EIGENVALUE,
                    });
                }

                // Shift from the leading 2x2 block.
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                // Implicit QL sweep.
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (left, right) = v.split_at_mut((i + 1) * n);
                    let vi = &mut left[i * n..];
                    let vi1 = &mut right[..n];
                    for k in 0..n {
                        let t = vi1[k];
                        vi1[k] = s * vi[k] + c * t;
                        vi[k] = c * vi[k] - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let a = DenseMatrix::from_rows(&[&[4.5]]).unwrap();
        let (d, v) = tridiagonal_ql(&a).unwrap();
        assert_eq!(d, vec![4.5]);
        assert_eq!(v.get(0, 0).abs(), 1.0);
    }

    #[test]
    fn two_by_two_closed_form() {
        // eigenvalues of [[2,1],[1,2]] are 3 and 1
        let a = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let (mut d, _) = tridiagonal_ql(&a).unwrap();
        d.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert!((d[0] - 3.0).abs() < 1e-14);
        assert!((d[1] - 1.0).abs() < 1e-14);
    }
}
