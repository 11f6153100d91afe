//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Vectorization is row-major throughout: entry `(i, j)` of an `r x c`
//! matrix lands at index `i * c + j`. Tensor products follow the same
//! convention (`kron(a, b)` puts `a`'s index first).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative rank tolerance shared by support and span computations.
pub const RANK_TOL: f64 = 1e-8;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Builds a matrix from row-major nested rows, rejecting ragged or
/// non-finite input.
pub fn cmatrix_from_rows(rows: &[Vec<C64>]) -> Result<CMatrix> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::InvalidArgument("matrix has no rows".into()));
    }
    let c = rows[0].len();
    if c == 0 {
        return Err(Error::InvalidArgument("matrix has no columns".into()));
    }
    for row in rows {
        if row.len() != c {
            return Err(Error::DimensionMismatch {
                what: "row length",
                expected: c,
                got: row.len(),
            });
        }
    }
    let m = CMatrix::from_fn(r, c, |i, j| rows[i][j]);
    check_finite(&m, "matrix")?;
    Ok(m)
}

pub fn check_finite(m: &CMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column vector `|k>` of dimension `n`.
pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = real(1.0);
    v
}

/// Hilbert-Schmidt inner product `tr(a^dag b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vectorize(m: &CMatrix) -> CVector {
    let (r, c) = m.shape();
    CVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unvectorize(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    debug_assert_eq!(v.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * real(0.5)
}

/// `(m - m^dag) / 2i`, the Hermitian "imaginary part".
pub fn skew_part(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()) * c64(0.0, -0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending
/// order with eigenvectors as matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Largest eigenvalue and a matching unit eigenvector.
pub fn top_eigenpair(m: &CMatrix) -> (f64, CVector) {
    let (vals, vecs) = hermitian_eigen(m);
    (vals[0], vecs.column(0).into_owned())
}

/// Singular values in descending order with left and right singular
/// vectors as columns (`m = u diag(s) v^dag`). Thin decomposition: `u` is
/// `rows x k`, `v` is `cols x k` with `k = min(rows, cols)`.
pub fn svd_sorted(m: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let (rows, cols) = m.shape();
    if rows < cols {
        let (s, u, v) = svd_sorted(&m.adjoint());
        return (s, v, u);
    }
    let (s, u, v) = jacobi_svd(m);
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let s_sorted: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let mut u = CMatrix::from_fn(rows, cols, |i, j| u[(i, order[j])]);
    let v = CMatrix::from_fn(cols, cols, |i, j| v[(i, order[j])]);
    complete_columns(&mut u, s_sorted.iter().take_while(|&&x| x > 0.0).count());
    (s_sorted, u, v)
}

/// One-sided (Hestenes) Jacobi SVD of a matrix with `rows >= cols`.
/// Returns unsorted singular values, `u` with columns `a v_j / s_j` (zero
/// columns where `s_j = 0`) and the unitary `v`.
///
/// `nalgebra`'s bidiagonal SVD loses accuracy on rank-deficient input,
/// which is exactly the regime of every rank decision here.
fn jacobi_svd(a: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let (rows, cols) = a.shape();
    debug_assert!(rows >= cols);
    let mut u = a.clone();
    let mut v = identity(cols);
    let eps = f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = u.column(p).norm_squared();
                let beta = u.column(q).norm_squared();
                let gamma = u.column(p).dotc(&u.column(q));
                let g = gamma.norm();
                // Below the normal range the phase loses its unit modulus and
                // the rotation stops being unitary.
                if g < f64::MIN_POSITIVE / eps || g <= eps * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let phase = phase / phase.norm();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                rotate_pair(&mut u, p, q, phase, c, sn);
                rotate_pair(&mut v, p, q, phase, c, sn);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s = vec![0.0; cols];
    for j in 0..cols {
        let norm = u.column(j).norm();
        s[j] = norm;
        if norm > 0.0 {
            u.column_mut(j).unscale_mut(norm);
        }
    }
    (s, u, v)
}

/// `x_p <- c x_p - s w x_q`, `x_q <- s x_p + c w x_q` with `w` a phase.
fn rotate_pair(m: &mut CMatrix, p: usize, q: usize, phase: C64, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * phase;
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}

/// Replaces columns `filled..` of `u` by unit vectors orthogonal to all
/// earlier columns (modified Gram-Schmidt over the standard basis).
fn complete_columns(u: &mut CMatrix, filled: usize) {
    let (rows, cols) = u.shape();
    let mut next = filled;
    for e in 0..rows {
        if next >= cols {
            break;
        }
        let mut x = basis_vector(rows, e);
        for _ in 0..2 {
            for j in 0..next {
                let proj = u.column(j).dotc(&x);
                x -= u.column(j) * proj;
            }
        }
        let norm = x.norm();
        if norm > 1e-6 {
            u.set_column(next, &(x / real(norm)));
            next += 1;
        }
    }
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    svd_sorted(m).0.first().copied().unwrap_or(0.0)
}

/// Orthonormal basis (as columns) for the column space of `vectors`,
/// discarding singular values at or below `rel_tol * sigma_max`.
pub fn orthonormal_columns(vectors: &CMatrix, rel_tol: f64) -> CMatrix {
    let n = vectors.nrows();
    if vectors.ncols() == 0 {
        return CMatrix::zeros(n, 0);
    }
    let (s, u, _) = svd_sorted(vectors);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return CMatrix::zeros(n, 0);
    }
    let r = s.iter().take_while(|&&x| x > rel_tol * smax).count();
    u.columns(0, r).into_owned()
}

/// Right null space of `m` (columns), singular values below `abs_tol`
/// counting as zero.
pub fn null_space(m: &CMatrix, abs_tol: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    // Pad to at least square so the SVD returns a full right basis.
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let (s, _, v) = svd_sorted(&padded);
    let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] < abs_tol).collect();
    CMatrix::from_fn(cols, keep.len(), |i, j| v[(i, keep[j])])
}

/// Orthonormal basis of the orthogonal complement of the column space of
/// `q` (assumed orthonormal columns) in `C^n`.
pub fn orthogonal_complement(q: &CMatrix, n: usize) -> CMatrix {
    if q.ncols() == 0 {
        return identity(n);
    }
    if q.ncols() >= n {
        return CMatrix::zeros(n, 0);
    }
    let proj = identity(n) - q * q.adjoint();
    // Eigenvalues of the complement projector are near 0 or 1, so an
    // absolute cut is needed when the complement is empty.
    let (s, u, _) = svd_sorted(&proj);
    let r = s.iter().take_while(|&&x| x > 0.5).count();
    u.columns(0, r).into_owned()
}

pub fn projector_onto(q: &CMatrix) -> CMatrix {
    q * q.adjoint()
}

/// Multiplies `v` by a global phase making its first component of
/// magnitude above `1e-10` real and non-negative.
pub fn canonicalize_phase(v: &mut CVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-10).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// `(I_n (x) m) v` for a vector on the bipartite space `C^n (x) C^cols(m)`,
/// without materializing the Kronecker product.
pub fn apply_right_factor(m: &CMatrix, v: &CVector, n: usize) -> CVector {
    let (r, c) = m.shape();
    debug_assert_eq!(v.len(), n * c);
    let mut out = CVector::zeros(n * r);
    for a in 0..n {
        for i in 0..r {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..c {
                acc += m[(i, j)] * v[a * c + j];
            }
            out[a * r + i] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![vec![real(1.0), real(0.0)], vec![real(1.0)]];
        assert!(cmatrix_from_rows(&rows).is_err());
        let rows = vec![vec![c64(f64::NAN, 0.0)]];
        assert_eq!(cmatrix_from_rows(&rows), Err(Error::NonFinite("matrix")));
    }

    #[test]
    fn vectorization_is_row_major() {
        let m = CMatrix::from_row_slice(2, 3, &(0..6).map(|k| real(k as f64)).collect::<Vec<_>>());
        let v = vectorize(&m);
        assert_eq!(v[1], real(1.0));
        assert_eq!(v[3], real(3.0));
        assert_eq!(unvectorize(&v, 2, 3), m);
    }

    #[test]
    fn eigenvalues_descend() {
        let (vals, vecs) = hermitian_eigen(&pauli_x());
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] + 1.0).abs() < 1e-12);
        let top = vecs.column(0);
        assert!((top[0].norm() - top[1].norm()).abs() < 1e-12);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // [1 1] has null space spanned by (1, -1)/sqrt2.
        let m = CMatrix::from_row_slice(1, 2, &[real(1.0), real(1.0)]);
        let ns = null_space(&m, 1e-8);
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(0, 0)] + ns[(1, 0)]).norm() < 1e-12);
    }

    #[test]
    fn right_factor_matches_kron() {
        let v = CVector::from_fn(4, |k, _| c64(k as f64, 1.0 - k as f64));
        let direct = kron(&identity(2), &pauli_x()) * &v;
        assert!((apply_right_factor(&pauli_x(), &v, 2) - direct).norm() < 1e-14);
    }
}
