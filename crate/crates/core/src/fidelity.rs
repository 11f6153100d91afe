//! Maximal fidelity between states and the two-state transformation channel.
//!
//! The maximal fidelity of `rho0, rho1` is the largest overlap `|<a|b>|` of
//! unit vectors `a` in the support of `rho0` and `b` in the support of
//! `rho1`. A channel mapping `rho_k` to pure targets `t_k` exists exactly
//! when this number does not exceed `|<t0|t1>|`; [`build_transform`]
//! constructs one.

use crate::error::{Error, Result};
use crate::quantcore::linalg::{self, CMatrix, CVector};
use crate::quantcore::{DensityOperator, PureState, QuantumChannel};

/// Slack on the feasibility test `F(rho0, rho1) <= |<t0|t1>|`.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// Singular values at or below this count as zero in the block decomposition.
pub const BLOCK_TOL: f64 = 1e-12;

/// Blocks with overlap above `1 - DEGENERATE_TOL` share a support vector.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// Cross-Gram matrix `U0^dag U1` of two support bases.
pub fn cross_gram(rho0: &DensityOperator, rho1: &DensityOperator) -> CMatrix {
    rho0.support_basis().adjoint() * rho1.support_basis()
}

pub fn max_fidelity(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    check_dims(rho0.dim(), rho1.dim())?;
    Ok(linalg::spectral_norm(&cross_gram(rho0, rho1)).clamp(0.0, 1.0))
}

/// Maximal fidelity of `rho0^{(x)n}` and `rho1^{(x)n}` from the `n`-fold
/// Kronecker power of the cross-Gram matrix.
pub fn max_fidelity_tensor_power(rho0: &DensityOperator, rho1: &DensityOperator, n: usize) -> Result<f64> {
    check_dims(rho0.dim(), rho1.dim())?;
    let c = cross_gram(rho0, rho1);
    let mut acc = CMatrix::from_element(1, 1, linalg::real(1.0));
    for _ in 0..n {
        acc = linalg::kron(&acc, &c);
    }
    Ok(linalg::spectral_norm(&acc).clamp(0.0, 1.0))
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { what: "state dimension", expected: a, got: b });
    }
    Ok(())
}

/// Singular value decomposition of `P0 P1` split into two-dimensional
/// blocks plus the parts of each support that the other support misses.
#[derive(Debug, Clone)]
pub struct SupportPairDecomposition {
    /// `lambda_k` in decreasing order, all in `(0, 1]`.
    pub singulars: Vec<f64>,
    /// Columns `psi0_k`, orthonormal, in the support of `rho0`.
    pub left: CMatrix,
    /// Columns `psi1_k`, orthonormal, in the support of `rho1`.
    pub right: CMatrix,
    /// Orthonormal basis of the part of `supp(rho0)` orthogonal to every `psi0_k`.
    pub left_residual: CMatrix,
    /// Orthonormal basis of the part of `supp(rho1)` orthogonal to every `psi1_k`.
    pub right_residual: CMatrix,
}

impl SupportPairDecomposition {
    pub fn rank(&self) -> usize {
        self.singulars.len()
    }

    pub fn dim(&self) -> usize {
        self.left.nrows()
    }

    /// Projector onto the residual of the first support.
    pub fn p0_residual(&self) -> CMatrix {
        linalg::projector_onto(&self.left_residual)
    }

    /// Projector onto the residual of the second support.
    pub fn p1_residual(&self) -> CMatrix {
        linalg::projector_onto(&self.right_residual)
    }

    /// Orthonormal frame `(f0, f1)` of block `k` with `f0 = psi0_k`. The
    /// second vector is absent when the block is one-dimensional.
    pub fn block_frame(&self, k: usize) -> (CVector, Option<CVector>) {
        let f0 = self.left.column(k).into_owned();
        let psi1 = self.right.column(k).into_owned();
        let rest = &psi1 - &f0 * f0.dotc(&psi1);
        let norm = rest.norm();
        let f1 = (norm > BLOCK_TOL).then(|| rest / linalg::real(norm));
        (f0, f1)
    }

    /// Projector onto `span{psi0_k, psi1_k}`.
    pub fn block_projector(&self, k: usize) -> CMatrix {
        let (f0, f1) = self.block_frame(k);
        let mut p = linalg::outer(&f0, &f0);
        if let Some(f1) = f1 {
            p += linalg::outer(&f1, &f1);
        }
        p
    }

    /// Orthonormal frame of `supp(rho0) + supp(rho1)` assembled from the
    /// block frames and both residuals.
    pub fn joint_frame(&self) -> CMatrix {
        let mut cols: Vec<CVector> = Vec::new();
        for k in 0..self.rank() {
            let (f0, f1) = self.block_frame(k);
            cols.push(f0);
            cols.extend(f1);
        }
        cols.extend(self.left_residual.column_iter().map(|c| c.into_owned()));
        cols.extend(self.right_residual.column_iter().map(|c| c.into_owned()));
        if cols.is_empty() {
            return CMatrix::zeros(self.dim(), 0);
        }
        CMatrix::from_columns(&cols)
    }
}

pub fn support_pair_decompose(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<SupportPairDecomposition> {
    check_dims(rho0.dim(), rho1.dim())?;
    let n = rho0.dim();
    let u0 = rho0.support_basis();
    let u1 = rho1.support_basis();
    let (r0, r1) = (u0.ncols(), u1.ncols());
    if r0 == 0 || r1 == 0 {
        return Ok(SupportPairDecomposition {
            singulars: Vec::new(),
            left: CMatrix::zeros(n, 0),
            right: CMatrix::zeros(n, 0),
            left_residual: u0.clone(),
            right_residual: u1.clone(),
        });
    }
    let (s, w, v) = linalg::svd_sorted(&(u0.adjoint() * u1));
    let r = s.iter().take_while(|&&x| x > BLOCK_TOL).count();
    let w_used = w.columns(0, r).into_owned();
    let v_used = v.columns(0, r).into_owned();
    let left_residual = u0 * linalg::orthogonal_complement(&w_used, r0);
    let right_residual = u1 * linalg::orthogonal_complement(&v_used, r1);
    Ok(SupportPairDecomposition {
        singulars: s[..r].iter().map(|x| x.min(1.0)).collect(),
        left: u0 * w_used,
        right: u1 * v_used,
        left_residual,
        right_residual,
    })
}

/// Targets with `<t0|t1'>` real and non-negative, `t1' = e^{i theta} t1`.
fn aligned_targets(t0: &PureState, t1: &PureState) -> (CVector, CVector, f64) {
    let ov = t0.inner(t1);
    let t = ov.norm();
    let phase = if t > 0.0 { ov.conj() / t } else { linalg::real(1.0) };
    (t0.amplitudes().clone(), t1.amplitudes() * phase, t)
}

/// Kraus pair of the block map `f0 -> t0 (x) |0>`,
/// `psi1 = s f0 + sqrt(1-s^2) f1 -> t1 (x) (c|0> + sqrt(1-c^2)|1>)` with
/// `c = s/t`, read off per ancilla outcome.
fn block_kraus(f0: &CVector, f1: &CVector, s: f64, t0: &CVector, t1: &CVector, t: f64) -> [CMatrix; 2] {
    let c = if t > 0.0 { (s / t).min(1.0) } else { 1.0 };
    let norm = (1.0 - s * s).sqrt();
    let k0 = linalg::outer(t0, f0) + linalg::outer(&((t1 * linalg::real(c) - t0 * linalg::real(s)) / linalg::real(norm)), f1);
    let k1 = linalg::outer(&(t1 * linalg::real((1.0 - c * c).max(0.0).sqrt() / norm)), f1);
    [k0, k1]
}

fn prepare_kraus<'a>(t: &CVector, basis: &'a CMatrix) -> impl Iterator<Item = CMatrix> + 'a {
    let t = t.clone();
    basis.column_iter().map(move |v| linalg::outer(&t, &v.into_owned()))
}

/// Channel `T` with `T(rho_k) = |t_k><t_k|`.
///
/// Measures the block decomposition of the two supports. Residual outcomes
/// and everything outside both supports prepare a target directly; block
/// outcomes apply a two-state map into the target space with a qubit
/// ancilla that is then discarded.
pub fn build_transform(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    t0: &PureState,
    t1: &PureState,
) -> Result<QuantumChannel> {
    check_dims(t0.dim(), t1.dim())?;
    let f = max_fidelity(rho0, rho1)?;
    let (t0v, t1v, t) = aligned_targets(t0, t1);
    if f > t + FEASIBILITY_TOL {
        return Err(Error::TransformInfeasible { source_fidelity: f, target_overlap: t });
    }
    let dec = support_pair_decompose(rho0, rho1)?;
    let n = dec.dim();
    let mut kraus: Vec<CMatrix> = Vec::new();
    for (k, &s) in dec.singulars.iter().enumerate() {
        let (f0, f1) = dec.block_frame(k);
        match f1 {
            Some(f1) if s <= 1.0 - DEGENERATE_TOL => kraus.extend(block_kraus(&f0, &f1, s, &t0v, &t1v, t)),
            f1 => {
                kraus.push(linalg::outer(&t0v, &f0));
                if let Some(f1) = f1 {
                    kraus.push(linalg::outer(&t0v, &f1));
                }
            }
        }
    }
    kraus.extend(prepare_kraus(&t0v, &dec.left_residual));
    kraus.extend(prepare_kraus(&t1v, &dec.right_residual));
    let frame = dec.joint_frame();
    let complement = linalg::orthogonal_complement(&frame, n);
    if frame.ncols() < n {
        kraus.extend(prepare_kraus(&t0v, &complement));
    }
    QuantumChannel::new(kraus)
}

/// Channel mapping `a_k` to `t_k`, requiring `|<a0|a1>| <= |<t0|t1>|`.
pub fn two_pure_transform(a0: &PureState, a1: &PureState, t0: &PureState, t1: &PureState) -> Result<QuantumChannel> {
    build_transform(&a0.density(), &a1.density(), t0, t1)
}

/// `<psi|rho|psi>`, the fidelity of `rho` with a pure target.
pub fn pure_fidelity(rho: &DensityOperator, psi: &PureState) -> f64 {
    rho.expectation(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantcore::linalg::{c64, real, C64};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(v: &[f64]) -> PureState {
        PureState::from_slice(&v.iter().map(|&x| real(x)).collect::<Vec<C64>>()).unwrap()
    }

    fn diag_density(entries: &[f64]) -> DensityOperator {
        DensityOperator::new(CMatrix::from_diagonal(&CVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| real(x)),
        )))
        .unwrap()
    }

    fn hiding_pair() -> (PureState, PureState) {
        let r2 = 2f64.sqrt();
        (ket(&[1.0, r2]), ket(&[1.0, -r2]))
    }

    fn assert_maps(t: &QuantumChannel, rho: &DensityOperator, target: &PureState, tol: f64) {
        let out = t.apply(rho).unwrap();
        let fid = pure_fidelity(&out, target);
        assert!(fid >= 1.0 - tol, "fidelity {fid}");
        assert!((out.trace() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn max_fidelity_examples() {
        let f = max_fidelity(&ket(&[1.0, 0.0]).density(), &ket(&[1.0, 1.0]).density()).unwrap();
        assert!((f - 0.5f64.sqrt()).abs() < 1e-12);

        let (p0, p1) = hiding_pair();
        let f = max_fidelity(&p0.density(), &p1.density()).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 1e-12);

        let mixed = DensityOperator::maximally_mixed(2);
        let f = max_fidelity(&mixed, &ket(&[0.3, 0.7]).density()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);

        let f = max_fidelity(&diag_density(&[0.5, 0.5, 0.0]), &ket(&[0.0, 1.0, 1.0]).density()).unwrap();
        assert!((f - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn decomposition_examples() {
        let d = support_pair_decompose(&ket(&[1.0, 0.0]).density(), &ket(&[0.0, 1.0]).density()).unwrap();
        assert_eq!(d.rank(), 0);
        assert_eq!(d.left_residual.ncols(), 1);
        assert_eq!(d.right_residual.ncols(), 1);

        let d = support_pair_decompose(&ket(&[1.0, 0.0]).density(), &ket(&[1.0, 1.0]).density()).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.singulars[0] - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(d.left_residual.ncols() + d.right_residual.ncols(), 0);

        let psi = ket(&[0.6, 0.8]);
        let d = support_pair_decompose(&psi.density(), &psi.density()).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.singulars[0] - 1.0).abs() < 1e-12);
        assert!(d.block_frame(0).1.is_none());
    }

    #[test]
    fn decomposition_invariants_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rho0 = random::density(&mut rng, 4, 2);
            let rho1 = random::density(&mut rng, 4, 1);
            let d = support_pair_decompose(&rho0, &rho1).unwrap();
            let overlaps = d.left.adjoint() * &d.right;
            for i in 0..d.rank() {
                for j in 0..d.rank() {
                    let expect = if i == j { d.singulars[i] } else { 0.0 };
                    assert!((overlaps[(i, j)] - real(expect)).norm() < 1e-8);
                }
            }
            let mut total = d.p0_residual() + d.p1_residual();
            for k in 0..d.rank() {
                total += d.block_projector(k);
            }
            let frame = d.joint_frame();
            assert!((total - linalg::projector_onto(&frame)).norm() < 1e-8);
            assert!((frame.adjoint() * &frame - linalg::identity(frame.ncols())).norm() < 1e-8);
        }
    }

    #[test]
    fn collapse_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho0 = random::density(&mut rng, 4, 2);
        let rho1 = random::density(&mut rng, 4, 2);
        let d = support_pair_decompose(&rho0, &rho1).unwrap();
        for _ in 0..10 {
            let x = rho0.support_basis() * random::pure_state(&mut rng, 2).amplitudes();
            for k in 0..d.rank() {
                let px = d.block_projector(k) * &x;
                let psi0 = d.left.column(k).into_owned();
                let parallel = &psi0 * psi0.dotc(&px);
                assert!((px - parallel).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn two_pure_identity_case() {
        let a0 = ket(&[1.0, 0.0]);
        let a1 = ket(&[1.0, 1.0]);
        let t = two_pure_transform(&a0, &a1, &a0, &a1).unwrap();
        assert_maps(&t, &a0.density(), &a0, 1e-9);
        assert_maps(&t, &a1.density(), &a1, 1e-9);
    }

    #[test]
    fn two_pure_contraction() {
        let a0 = ket(&[1.0, 0.0]);
        let a1 = ket(&[1.0, 1.0]);
        let t0 = ket(&[1.0, 0.0]);
        let t1 = ket(&[0.8, 0.6]);
        let t = two_pure_transform(&a0, &a1, &t0, &t1).unwrap();
        assert!(t.completeness_deviation() < 1e-9);
        assert_maps(&t, &a0.density(), &t0, 1e-9);
        assert_maps(&t, &a1.density(), &t1, 1e-9);
    }

    #[test]
    fn two_pure_orthogonal_sources() {
        let t0 = PureState::from_slice(&[real(1.0), c64(0.0, 1.0), real(0.5)]).unwrap();
        let t1 = t0.clone();
        let t = two_pure_transform(&ket(&[1.0, 0.0]), &ket(&[0.0, 1.0]), &t0, &t1).unwrap();
        assert_eq!(t.dim_out(), 3);
        assert_maps(&t, &ket(&[0.0, 1.0]).density(), &t1, 1e-12);
    }

    #[test]
    fn refuses_when_sources_overlap_more() {
        let err = two_pure_transform(&ket(&[1.0, 0.0]), &ket(&[0.8, 0.6]), &ket(&[1.0, 0.0]), &ket(&[1.0, 1.0]))
            .unwrap_err();
        match err {
            Error::TransformInfeasible { source_fidelity, target_overlap } => {
                assert!((source_fidelity - 0.8).abs() < 1e-12);
                assert!((target_overlap - 0.5f64.sqrt()).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mixed_disjoint_supports() {
        let rho0 = diag_density(&[0.5, 0.5, 0.0]);
        let rho1 = diag_density(&[0.0, 0.0, 1.0]);
        let t0 = ket(&[1.0, 0.0]);
        let t1 = ket(&[0.0, 1.0]);
        let t = build_transform(&rho0, &rho1, &t0, &t1).unwrap();
        assert_maps(&t, &rho0, &t0, 1e-12);
        assert_maps(&t, &rho1, &t1, 1e-12);
    }

    #[test]
    fn complex_target_phases() {
        let t0 = PureState::from_slice(&[real(1.0), c64(0.0, 1.0)]).unwrap();
        let t1 = PureState::from_slice(&[c64(0.0, 1.0), real(0.2)]).unwrap();
        let a0 = ket(&[1.0, 0.0, 0.0]);
        let a1 = ket(&[0.2, 0.3, 1.0]);
        let t = two_pure_transform(&a0, &a1, &t0, &t1).unwrap();
        assert_maps(&t, &a0.density(), &t0, 1e-9);
        assert_maps(&t, &a1.density(), &t1, 1e-9);
    }

    #[test]
    fn shared_support_vector_requires_equal_targets() {
        let rho0 = diag_density(&[0.5, 0.5, 0.0]);
        let rho1 = diag_density(&[0.0, 0.5, 0.5]);
        let t0 = ket(&[0.6, 0.8]);
        assert!(build_transform(&rho0, &rho1, &t0, &ket(&[0.8, 0.6])).is_err());
        let t = build_transform(&rho0, &rho1, &t0, &t0).unwrap();
        assert_maps(&t, &rho0, &t0, 1e-9);
        assert_maps(&t, &rho1, &t0, 1e-9);
    }

    #[test]
    fn tensor_power_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho0 = random::density(&mut rng, 2, 1);
        let rho1 = random::density(&mut rng, 2, 1);
        let f = max_fidelity(&rho0, &rho1).unwrap();
        for n in 0..4 {
            let direct = max_fidelity(&rho0.tensor_power(n), &rho1.tensor_power(n)).unwrap();
            let gram = max_fidelity_tensor_power(&rho0, &rho1, n).unwrap();
            assert!((direct - f.powi(n as i32)).abs() < 1e-9);
            assert!((gram - direct).abs() < 1e-9);
        }
    }
}
