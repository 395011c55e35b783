//! Dense linear-algebra primitives backing the subspace machinery:
//! orthonormal bases, minimum-norm least squares, operator norms, nullspaces.
//!
//! Factorizations are delegated to `nalgebra`; the operator norm is computed
//! independently by power iteration on the Gram operator so it can serve as a
//! cross-check against full decompositions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Orthonormal basis for the span of `vectors` inside `R^dim`.
///
/// Returns a `dim x k` matrix with orthonormal columns, where `k` is the
/// numerical rank of the input at threshold `tol * max_column_norm`,
/// determined by a Householder QR with column pivoting. An empty or all-zero
/// input yields a `dim x 0` matrix.
pub fn orthonormalize(dim: usize, vectors: &[Vector], tol: f64) -> Result<Matrix> {
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        if !v.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("spanning vector"));
        }
    }
    if vectors.is_empty() {
        return Ok(Matrix::zeros(dim, 0));
    }
    let max_col = vectors.iter().map(Vector::norm).fold(0.0, f64::max);
    if max_col == 0.0 {
        return Ok(Matrix::zeros(dim, 0));
    }
    let a = Matrix::from_columns(vectors);
    let qr = a.col_piv_qr();
    let r = qr.r();
    let threshold = tol * max_col;
    let rank = (0..r.nrows().min(r.ncols()))
        .take_while(|&i| r[(i, i)].abs() > threshold)
        .count();
    Ok(qr.q().columns(0, rank).into_owned())
}

/// Minimum-norm least-squares solution of `m x = b` and its residual norm.
///
/// Computed through the pseudo-inverse: singular values below
/// `RANK_REL * sigma_max` are treated as zero, which makes the solution the
/// smallest one among all least-squares solutions.
pub fn least_squares(m: &Matrix, b: &Vector) -> Result<(Vector, f64)> {
    if m.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: b.len(),
        });
    }
    if m.ncols() == 0 {
        return Ok((Vector::zeros(0), b.norm()));
    }
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let x = if sigma_max == 0.0 {
        Vector::zeros(m.ncols())
    } else {
        svd.solve(b, tol::RANK_REL * sigma_max)
            .map_err(|e| Error::InvalidInput(e.to_string()))?
    };
    let residual = (m * &x - b).norm();
    Ok((x, residual))
}

/// Largest singular value of `m`, to relative accuracy `tol`.
///
/// Power iteration on the Gram operator `M^T M` (or `M M^T`, whichever is
/// smaller), stopped when the eigen-residual drops below `tol` times the
/// current Rayleigh quotient.
pub fn operator_norm(m: &Matrix, tol: f64) -> f64 {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let transposed;
    let gram_side = if cols <= rows {
        m
    } else {
        transposed = m.transpose();
        &transposed
    };
    let n = gram_side.ncols();
    let mut v = Vector::from_iterator(n, (0..n).map(|i| splitmix(i as u64) - 0.5));
    let nv = v.norm();
    if nv == 0.0 {
        v = Vector::from_element(n, 1.0);
    }
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..100_000 {
        let w = gram_side.tr_mul(&(gram_side * &v));
        lambda = v.dot(&w);
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        if (&w - &v * lambda).norm() <= tol * lambda.abs() {
            break;
        }
        v = w / wn;
    }
    lambda.max(0.0).sqrt()
}

/// Orthonormal basis of the nullspace of `m`, as a `ncols x k` matrix.
///
/// Right singular vectors whose singular values fall below
/// `tol * sigma_max` span the kernel. Wide matrices are padded with zero rows
/// first so that the full set of right singular vectors is available.
pub fn nullspace(m: &Matrix, tol: f64) -> Matrix {
    let (p, q) = m.shape();
    if q == 0 {
        return Matrix::zeros(0, 0);
    }
    if p == 0 {
        return Matrix::identity(q, q);
    }
    let work = if p < q {
        let mut padded = Matrix::zeros(q, q);
        padded.view_mut((0, 0), (p, q)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let threshold = tol * sigma_max;
    let kernel_rows: Vec<usize> = (0..q)
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    let mut basis = Matrix::zeros(q, kernel_rows.len());
    for (j, &i) in kernel_rows.iter().enumerate() {
        basis.set_column(j, &v_t.row(i).transpose());
    }
    basis
}

fn splitmix(i: u64) -> f64 {
    let mut z = i.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}
