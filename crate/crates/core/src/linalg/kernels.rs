//! Cache-blocked inner-product kernels.
//!
//! Every entry produced here is a [`dot`] (or a sum of [`dot`]s over fixed
//! chunk boundaries), so results are bit-identical regardless of thread
//! count or traversal order.

use rayon::prelude::*;

use super::matrix::DenseMatrix;
use crate::error::{PccError, Result};

const LANES: usize = 4;
/// Inner-dimension chunk for the symmetric Gram kernel.
const K_CHUNK: usize = 512;
/// Rows of the output handled per task.
const ROW_BLOCK: usize = 16;

/// Inner product with four interleaved partial sums.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..LANES {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `R × C` inner products `<a_r, b_c>`, each summed in exactly the order
/// [`dot`] uses, so every entry is bit-identical to the scalar call.
#[inline(always)]
fn dot_block<const R: usize, const C: usize>(a: [&[f64]; R], b: [&[f64]; C]) -> [[f64; C]; R] {
    let len = a[0].len();
    for v in a.iter().chain(b.iter()) {
        assert_eq!(v.len(), len);
    }
    let body = len - len % LANES;
    let mut acc = [[[0.0f64; LANES]; C]; R];
    let mut k = 0;
    while k < body {
        for r in 0..R {
            for c in 0..C {
                for l in 0..LANES {
                    // SAFETY: k + l < body <= len, and every slice has length len.
                    unsafe {
                        acc[r][c][l] += *a[r].get_unchecked(k + l) * *b[c].get_unchecked(k + l);
                    }
                }
            }
        }
        k += LANES;
    }
    let mut out = [[0.0f64; C]; R];
    for r in 0..R {
        for c in 0..C {
            let mut tail = 0.0;
            for t in body..len {
                tail += a[r][t] * b[c][t];
            }
            let s = &acc[r][c];
            out[r][c] = (s[0] + s[1]) + (s[2] + s[3]) + tail;
        }
    }
    out
}

/// Rows of `a` (given as slices) times columns of `b`: calls `emit(i, j,
/// <a_i, b_j>)` for every `i in rows`, `j in cols`, in register blocks.
#[inline]
fn for_each_dot<'s>(
    a: impl Fn(usize) -> &'s [f64],
    b: impl Fn(usize) -> &'s [f64],
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
    mut emit: impl FnMut(usize, usize, f64),
) {
    const R: usize = 4;
    const C: usize = 2;
    let mut j = cols.start;
    while j + C <= cols.end {
        let bj = [b(j), b(j + 1)];
        let mut i = rows.start;
        while i + R <= rows.end {
            let blk = dot_block::<R, C>([a(i), a(i + 1), a(i + 2), a(i + 3)], bj);
            for (r, row) in blk.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    emit(i + r, j + c, v);
                }
            }
            i += R;
        }
        while i < rows.end {
            let blk = dot_block::<1, C>([a(i)], bj);
            for (c, &v) in blk[0].iter().enumerate() {
                emit(i, j + c, v);
            }
            i += 1;
        }
        j += C;
    }
    while j < cols.end {
        let bj = b(j);
        for i in rows.clone() {
            emit(i, j, dot(a(i), bj));
        }
        j += 1;
    }
}

/// `y += s * x`
#[inline]
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Symmetric matrix of pairwise inner products of the columns of `v`,
/// scaled by `scale`: `G(i, j) = scale * <v_i, v_j>`.
///
/// The inner dimension is processed in fixed chunks of [`K_CHUNK`]; each
/// upper-triangle entry is accumulated chunk by chunk and then mirrored.
pub fn scaled_column_gram(v: &DenseMatrix, scale: f64) -> DenseMatrix {
    let n = v.cols();
    let len = v.rows();
    // Row-major upper-triangle accumulator; rows are split across tasks.
    let mut acc = vec![0.0f64; n * n];
    let mut k0 = 0;
    while k0 < len {
        let k1 = (k0 + K_CHUNK).min(len);
        acc.par_chunks_mut(ROW_BLOCK * n)
            .enumerate()
            .for_each(|(blk, rows)| {
                let i0 = blk * ROW_BLOCK;
                let i1 = (i0 + ROW_BLOCK).min(n);
                let col = |c: usize| &v.column(c)[k0..k1];
                // Full-height column strip, then the triangle at its left edge.
                let mut emit = |i: usize, j: usize, g: f64| {
                    if i <= j {
                        rows[(i - i0) * n + j] += g;
                    }
                };
                for_each_dot(col, col, i0..i1, i0..n, &mut emit);
            });
        k0 = k1;
    }
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g = acc[i * n + j] * scale;
            out.set(i, j, g);
            out.set(j, i, g);
        }
    }
    out
}

/// `aᵀ b`, each entry a single [`dot`] of a column of `a` with a column of `b`.
pub fn transpose_matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() != b.rows() {
        return Err(PccError::Shape(format!(
            "cannot form aᵀb for a {}x{} and b {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    const COL_BLOCK: usize = 64;
    let m = a.cols();
    let mut data = vec![0.0f64; m * b.cols()];
    if m == 0 {
        return Ok(DenseMatrix::from_parts_unchecked(0, b.cols(), data));
    }
    if is_sparse(b) {
        sparse_rhs_transpose_matmul(a, b, &mut data);
        return Ok(DenseMatrix::from_parts_unchecked(m, b.cols(), data));
    }
    // Blocks of output columns (instances of b) stay hot in cache while
    // every column of a streams past them.
    data.par_chunks_mut(COL_BLOCK * m)
        .enumerate()
        .for_each(|(blk, out)| {
            let j0 = blk * COL_BLOCK;
            let j1 = (j0 + COL_BLOCK).min(b.cols());
            for_each_dot(
                |i| a.column(i),
                |j| b.column(j),
                0..m,
                j0..j1,
                |i, j, v| out[(j - j0) * m + i] = v,
            );
        });
    Ok(DenseMatrix::from_parts_unchecked(m, b.cols(), data))
}

/// Fraction of non-zero entries below which the sparse paths are used.
const SPARSE_DENSITY: f64 = 0.3;

fn is_sparse(m: &DenseMatrix) -> bool {
    let nnz = m.as_slice().iter().filter(|&&v| v != 0.0).count();
    (nnz as f64) < SPARSE_DENSITY * m.as_slice().len() as f64
}

/// Non-zero `(row, value)` pairs of each column, rows ascending.
fn column_nonzeros(m: &DenseMatrix) -> Vec<Vec<(usize, f64)>> {
    m.columns()
        .map(|c| c.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(k, &v)| (k, v)).collect())
        .collect()
}

// The sparse kernels below skip zero entries but keep every remaining
// product in the lane (or tail) and position `dot` would give it. A lane
// accumulator starts at +0.0 and can never become -0.0 by adding finite
// non-zero products, so the skipped `±0.0` additions are exact no-ops and
// the results are bit-identical to the dense kernels.

/// `aᵀ b` for a sparse `b`: one `axpy` over the rows of `a` per non-zero.
fn sparse_rhs_transpose_matmul(a: &DenseMatrix, b: &DenseMatrix, data: &mut [f64]) {
    let m = a.cols();
    let len = a.rows();
    let body = len - len % LANES;
    let at = a.transpose();
    data.par_chunks_mut(m).enumerate().for_each_init(
        || vec![0.0f64; (LANES + 1) * m],
        |slots, (j, out)| {
            slots.fill(0.0);
            for (k, &v) in b.column(j).iter().enumerate() {
                if v != 0.0 {
                    let slot = if k < body { k % LANES } else { LANES };
                    axpy(v, at.column(k), &mut slots[slot * m..(slot + 1) * m]);
                }
            }
            let (s0, rest) = slots.split_at(m);
            let (s1, rest) = rest.split_at(m);
            let (s2, rest) = rest.split_at(m);
            let (s3, tail) = rest.split_at(m);
            for i in 0..m {
                out[i] = (s0[i] + s1[i]) + (s2[i] + s3[i]) + tail[i];
            }
        },
    );
}

/// `scale · Z Zᵀ` for a `d × N` matrix `z`, exactly symmetric. Equal, bit
/// for bit, to [`scaled_column_gram`] of `zᵀ`.
pub fn scaled_row_gram(z: &DenseMatrix, scale: f64) -> DenseMatrix {
    if is_sparse(z) {
        sparse_row_gram(z, scale)
    } else {
        scaled_column_gram(&z.transpose(), scale)
    }
}

fn sparse_row_gram(z: &DenseMatrix, scale: f64) -> DenseMatrix {
    let (n, len) = z.shape();
    let nz = column_nonzeros(z);
    let stride = (LANES + 1) * n;
    // Per output row: LANES lane accumulators and a tail, each n wide.
    let mut slots = vec![0.0f64; n * stride];
    let mut acc = vec![0.0f64; n * n];
    let mut k0 = 0;
    while k0 < len {
        let k1 = (k0 + K_CHUNK).min(len);
        let body = (k1 - k0) - (k1 - k0) % LANES;
        slots
            .par_chunks_mut(ROW_BLOCK * stride)
            .zip(acc.par_chunks_mut(ROW_BLOCK * n))
            .enumerate()
            .for_each(|(blk, (slot_rows, acc_rows))| {
                let i0 = blk * ROW_BLOCK;
                let i1 = (i0 + ROW_BLOCK).min(n);
                for (k, col) in nz[k0..k1].iter().enumerate() {
                    let slot = if k < body { k % LANES } else { LANES };
                    for (p, &(a, va)) in col.iter().enumerate() {
                        if a < i0 {
                            continue;
                        }
                        if a >= i1 {
                            break;
                        }
                        let row = &mut slot_rows[(a - i0) * stride + slot * n..][..n];
                        for &(b, vb) in &col[p..] {
                            row[b] += va * vb;
                        }
                    }
                }
                for i in i0..i1 {
                    let r = &mut slot_rows[(i - i0) * stride..][..stride];
                    for j in i..n {
                        let l = |s: usize| r[s * n + j];
                        acc_rows[(i - i0) * n + j] += (l(0) + l(1)) + (l(2) + l(3)) + l(LANES);
                    }
                    r.fill(0.0);
                }
            });
        k0 = k1;
    }
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g = acc[i * n + j] * scale;
            out.set(i, j, g);
            out.set(j, i, g);
        }
    }
    out
}
