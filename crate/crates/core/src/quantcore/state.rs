use std::sync::OnceLock;

use super::linalg::{self, CMatrix, CVector, C64, RANK_TOL};
use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-10;

/// A unit vector with canonical global phase: the first component of
/// magnitude above `1e-10` is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Wraps an already normalized vector.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("pure state of dimension 0".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("pure state"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let mut amplitudes = amplitudes / linalg::real(norm);
        linalg::canonicalize_phase(&mut amplitudes);
        Ok(Self { amplitudes })
    }

    /// Normalizes `v` keeping its global phase, for a state whose phase
    /// relative to another one matters.
    pub fn normalized_keep_phase(v: CVector) -> Result<Self> {
        let mut state = Self::normalized(v.clone())?;
        let norm = v.norm();
        state.amplitudes = v / linalg::real(norm);
        Ok(state)
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("pure state"));
        }
        if norm < 1e-300 {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        Self::new(v / linalg::real(norm))
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::normalized(CVector::from_column_slice(amplitudes))
    }

    /// Computational basis state `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self { amplitudes: linalg::basis_vector(dim, k) }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        Self { amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }
}

/// Eigen-support of a density operator.
#[derive(Debug, Clone)]
struct Support {
    basis: CMatrix,
}

/// A density operator with a lazily computed support basis.
///
/// The support keeps eigenvectors whose eigenvalue exceeds
/// `rank_tolerance * lambda_max`.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
    rank_tolerance: f64,
    support: OnceLock<Support>,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace (all within `1e-10`).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c || r == 0 {
            return Err(Error::DimensionMismatch { what: "density operator columns", expected: r, got: c });
        }
        linalg::check_finite(&matrix, "density operator")?;
        let herm_dev = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if herm_dev > STATE_TOL {
            return Err(Error::NotHermitian(herm_dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let (vals, _) = linalg::hermitian_eigen(&matrix);
        let min = vals.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    /// Skips validation; the matrix is symmetrized. Used for outputs of
    /// operations that preserve the invariants up to rounding.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix: linalg::hermitian_part(&matrix), rank_tolerance: RANK_TOL, support: OnceLock::new() }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        let basis = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
        Self {
            matrix: linalg::outer(v, v),
            rank_tolerance: RANK_TOL,
            support: OnceLock::from(Support { basis }),
        }
    }

    /// `sum_k |v_k><v_k|` for the columns `v_k` of `vectors`, whose squared
    /// norms must sum to one. The support comes straight from an SVD of
    /// `vectors`, which is more accurate than diagonalizing the product.
    pub fn from_ensemble(vectors: &CMatrix) -> Self {
        let matrix = vectors * vectors.adjoint();
        let basis = linalg::orthonormal_columns(vectors, RANK_TOL.sqrt());
        Self { matrix, rank_tolerance: RANK_TOL, support: OnceLock::from(Support { basis }) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(linalg::identity(dim) * linalg::real(1.0 / dim as f64))
    }

    /// Overrides the relative eigenvalue cutoff used for the support.
    pub fn with_rank_tolerance(mut self, rank_tolerance: f64) -> Self {
        self.rank_tolerance = rank_tolerance;
        self.support = OnceLock::new();
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    fn support(&self) -> &Support {
        self.support.get_or_init(|| {
            let (vals, vecs) = linalg::hermitian_eigen(&self.matrix);
            let top = vals.first().copied().unwrap_or(0.0);
            let r = if top > 0.0 { vals.iter().take_while(|&&x| x > self.rank_tolerance * top).count() } else { 0 };
            Support { basis: vecs.columns(0, r).into_owned() }
        })
    }

    /// Orthonormal support basis as columns.
    pub fn support_basis(&self) -> &CMatrix {
        &self.support().basis
    }

    pub fn rank(&self) -> usize {
        self.support_basis().ncols()
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let basis = linalg::kron(self.support_basis(), other.support_basis());
        Self {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            rank_tolerance: self.rank_tolerance,
            support: OnceLock::from(Support { basis }),
        }
    }

    /// `rho^{(x) n}`; `n = 0` gives the scalar state `1`.
    pub fn tensor_power(&self, n: usize) -> DensityOperator {
        let mut acc = DensityOperator::from_pure(&PureState::basis(1, 0));
        for _ in 0..n {
            acc = acc.tensor(self);
        }
        acc
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        let v = psi.amplitudes();
        v.dotc(&(&self.matrix * v)).re
    }
}

/// Orthogonal projector onto the support of `rho`.
pub fn support_projector(rho: &DensityOperator) -> CMatrix {
    linalg::projector_onto(rho.support_basis())
}

/// `(1/sqrt d) sum_k |k>|k>` on `C^d (x) C^d`.
pub fn max_entangled(d: usize) -> PureState {
    let amp = 1.0 / (d as f64).sqrt();
    let v = CVector::from_fn(d * d, |k, _| if k / d == k % d { linalg::real(amp) } else { linalg::real(0.0) });
    PureState { amplitudes: v }
}
