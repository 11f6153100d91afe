//! Subspaces of matrices under the Hilbert-Schmidt inner product.
//!
//! A span is stored as an orthonormal list of matrices. All rank decisions
//! are SVD based on the vectorized matrices.

use crate::error::{Error, Result};
use crate::quantcore::linalg::{self, CMatrix, CVector, RANK_TOL};

/// Relative residual below which a matrix counts as a member of a span.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct OperatorSpan {
    shape: (usize, usize),
    basis: Vec<CMatrix>,
    tolerance: f64,
}

/// Result of a membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub contained: bool,
    /// `||A - P(A)||_HS / ||A||_HS`.
    pub residual: f64,
}

impl OperatorSpan {
    /// The zero subspace.
    pub fn zero(shape: (usize, usize)) -> Self {
        Self { shape, basis: Vec::new(), tolerance: RANK_TOL }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Basis vectors stacked as columns of a `(rows*cols) x dim` matrix.
    fn stacked(&self) -> CMatrix {
        let n = self.shape.0 * self.shape.1;
        if self.basis.is_empty() {
            return CMatrix::zeros(n, 0);
        }
        let cols: Vec<CVector> = self.basis.iter().map(linalg::vectorize).collect();
        CMatrix::from_columns(&cols)
    }

    fn from_columns(shape: (usize, usize), q: &CMatrix, tolerance: f64) -> Self {
        let basis = (0..q.ncols())
            .map(|j| linalg::unvectorize(&q.column(j).into_owned(), shape.0, shape.1))
            .collect();
        Self { shape, basis, tolerance }
    }

    /// Orthogonal projection of `a` onto the span.
    pub fn project(&self, a: &CMatrix) -> CMatrix {
        self.basis
            .iter()
            .fold(CMatrix::zeros(self.shape.0, self.shape.1), |acc, b| acc + b * linalg::hs_inner(b, a))
    }

    fn check_shape(&self, a: &CMatrix) -> Result<()> {
        if a.shape() != self.shape {
            return Err(Error::DimensionMismatch {
                what: "matrix shape",
                expected: self.shape.0 * self.shape.1,
                got: a.nrows() * a.ncols(),
            });
        }
        Ok(())
    }
}

/// Orthonormal basis of the linear hull of `mats` (zero matrices allowed).
pub fn span_from(mats: &[CMatrix]) -> Result<OperatorSpan> {
    span_from_with_tol(mats, RANK_TOL)
}

/// As [`span_from`], discarding singular values at or below `tol * sigma_max`.
pub fn span_from_with_tol(mats: &[CMatrix], tol: f64) -> Result<OperatorSpan> {
    let first = mats.first().ok_or(Error::Empty)?;
    let shape = first.shape();
    for m in mats {
        if m.shape() != shape {
            return Err(Error::DimensionMismatch {
                what: "matrix shape",
                expected: shape.0 * shape.1,
                got: m.nrows() * m.ncols(),
            });
        }
    }
    let cols: Vec<CVector> = mats.iter().map(linalg::vectorize).collect();
    let q = linalg::orthonormal_columns(&CMatrix::from_columns(&cols), tol);
    Ok(OperatorSpan::from_columns(shape, &q, tol))
}

pub fn contains(s: &OperatorSpan, a: &CMatrix) -> Result<Membership> {
    s.check_shape(a)?;
    let norm = linalg::hs_norm(a);
    if norm == 0.0 {
        return Ok(Membership { contained: true, residual: 0.0 });
    }
    let residual = linalg::hs_norm(&(a - s.project(a))) / norm;
    Ok(Membership { contained: residual < MEMBERSHIP_TOL, residual })
}

/// `S0 ∩ S1`, from the null space of `[basis(S0) | -basis(S1)]`.
pub fn intersect(s0: &OperatorSpan, s1: &OperatorSpan) -> Result<OperatorSpan> {
    intersect_with_tol(s0, s1, RANK_TOL)
}

pub fn intersect_with_tol(s0: &OperatorSpan, s1: &OperatorSpan, tol: f64) -> Result<OperatorSpan> {
    if s0.shape != s1.shape {
        return Err(Error::DimensionMismatch {
            what: "span shape",
            expected: s0.shape.0 * s0.shape.1,
            got: s1.shape.0 * s1.shape.1,
        });
    }
    if s0.is_zero() || s1.is_zero() {
        return Ok(OperatorSpan::zero(s0.shape));
    }
    let q0 = s0.stacked();
    let q1 = s1.stacked();
    let (n, k0, k1) = (q0.nrows(), q0.ncols(), q1.ncols());
    let mut stacked = CMatrix::zeros(n, k0 + k1);
    stacked.view_mut((0, 0), (n, k0)).copy_from(&q0);
    stacked.view_mut((0, k0), (n, k1)).copy_from(&(-q1));
    let ns = linalg::null_space(&stacked, tol);
    if ns.ncols() == 0 {
        return Ok(OperatorSpan::zero(s0.shape));
    }
    let vectors = &q0 * ns.rows(0, k0);
    let q = linalg::orthonormal_columns(&vectors, tol);
    Ok(OperatorSpan::from_columns(s0.shape, &q, tol))
}

/// `M = A - P_S(A)`, the component of `A` orthogonal to `S`. For `A = I`
/// this maximizes `tr(M)` over unit-norm elements of the complement, up to
/// scale, and `tr(M) = ||M||^2`.
pub fn complement_projection(s: &OperatorSpan, a: &CMatrix) -> Result<CMatrix> {
    s.check_shape(a)?;
    Ok(a - s.project(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantcore::linalg::{c64, real};

    fn m2(a: f64, b: f64, c: f64, d: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(a), real(b), real(c), real(d)])
    }

    fn x() -> CMatrix {
        m2(0.0, 1.0, 1.0, 0.0)
    }

    fn z() -> CMatrix {
        m2(1.0, 0.0, 0.0, -1.0)
    }

    fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), c64(0.0, -1.0), c64(0.0, 1.0), real(0.0)])
    }

    fn id() -> CMatrix {
        linalg::identity(2)
    }

    #[test]
    fn span_dimensions() {
        assert_eq!(span_from(&[id()]).unwrap().dim(), 1);
        assert_eq!(span_from(&[id(), id() * real(2.0), x()]).unwrap().dim(), 2);
        assert_eq!(span_from(&[CMatrix::zeros(2, 2), x()]).unwrap().dim(), 1);
        assert_eq!(span_from(&[CMatrix::zeros(2, 2)]).unwrap().dim(), 0);
    }

    #[test]
    fn span_errors() {
        assert!(matches!(span_from(&[]), Err(Error::Empty)));
        assert!(matches!(span_from(&[id(), linalg::identity(3)]), Err(Error::DimensionMismatch { .. })));
        let s = span_from(&[id()]).unwrap();
        assert!(contains(&s, &linalg::identity(3)).is_err());
    }

    #[test]
    fn basis_is_orthonormal() {
        let s = span_from(&[id(), x() * real(3.0), id() + z()]).unwrap();
        for (i, a) in s.basis().iter().enumerate() {
            for (j, b) in s.basis().iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((linalg::hs_inner(a, b) - real(expect)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let m = contains(&span_from(&[x()]).unwrap(), &id()).unwrap();
        assert!(!m.contained);
        assert!((m.residual - 1.0).abs() < 1e-12);

        let paulis = [id(), x(), y(), z()].map(|p| p * real(0.5));
        assert!(contains(&span_from(&paulis).unwrap(), &id()).unwrap().contained);

        let zero = contains(&span_from(&[x()]).unwrap(), &CMatrix::zeros(2, 2)).unwrap();
        assert_eq!(zero, Membership { contained: true, residual: 0.0 });
    }

    #[test]
    fn amplitude_damping_span_misses_identity() {
        // A0 = diag(1, s), A1 = s |0><1| with s = sqrt(1/2). The projection of
        // I onto span{A0, A1} is (1 + s)/(1 + s^2) A0, leaving residual
        // diag(1 - c, 1 - c s) with c = (1 + s)/(1 + s^2).
        let s = 0.5f64.sqrt();
        let span = span_from(&[m2(1.0, 0.0, 0.0, s), m2(0.0, s, 0.0, 0.0)]).unwrap();
        let mem = contains(&span, &id()).unwrap();
        let c = (1.0 + s) / (1.0 + s * s);
        let expected = (((1.0 - c).powi(2) + (1.0 - c * s).powi(2)) / 2.0).sqrt();
        assert!(!mem.contained);
        assert!((mem.residual - expected).abs() < 1e-12);
    }

    #[test]
    fn intersection_examples() {
        let si = span_from(&[id()]).unwrap();
        let sx = span_from(&[x()]).unwrap();
        assert!(intersect(&si, &sx).unwrap().is_zero());

        // Nullspace of [I X | -X -Z] over vec(2x2) is one-dimensional: x-coefficient pairs.
        let a = span_from(&[id(), x()]).unwrap();
        let b = span_from(&[x(), z()]).unwrap();
        let inter = intersect(&a, &b).unwrap();
        assert_eq!(inter.dim(), 1);
        let overlap = linalg::hs_inner(&inter.basis()[0], &(x() * real(0.5f64.sqrt()))).norm();
        assert!((overlap - 1.0).abs() < 1e-10);

        let self_inter = intersect(&a, &a).unwrap();
        assert_eq!(self_inter.dim(), 2);
    }

    #[test]
    fn complement_projection_examples() {
        let m = complement_projection(&span_from(&[x()]).unwrap(), &id()).unwrap();
        assert!((m - id()).norm() < 1e-12);
        let m = complement_projection(&span_from(&[id()]).unwrap(), &id()).unwrap();
        assert!(m.norm() < 1e-12);
        // P_{(I+X)/2}(I) = <(I+X)/2, I>/||(I+X)/2||^2 (I+X)/2 = (I+X)/2, so M = (I-X)/2.
        let m = complement_projection(&span_from(&[(id() + x()) * real(0.5)]).unwrap(), &id()).unwrap();
        assert!((&m - (id() - x()) * real(0.5)).norm() < 1e-12);
        assert!((m.trace() - real(1.0)).norm() < 1e-12);
    }
}
