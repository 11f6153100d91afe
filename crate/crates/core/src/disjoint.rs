//! Entanglement-assisted disjointness of two channels.
//!
//! Repeatedly intersects the Kraus spans of the two channels. Whenever the
//! intersection is nonzero, the support of `sum D^dag D` over an
//! intersection basis is split off and both channels are restricted to its
//! orthogonal complement. What remains at the end is the support of a
//! witness input.

use crate::error::{Error, Result};
use crate::fidelity;
use crate::quantcore::linalg::{self, CMatrix, RANK_TOL};
use crate::quantcore::{max_entangled, PureState, QuantumChannel};
use crate::span;

/// Maximal fidelity below `1 - WITNESS_TOL` certifies distinct outputs.
pub const WITNESS_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct DisjointnessReport {
    pub disjoint: bool,
    /// Normalized `(I (x) P)|alpha>` on `C^d (x) C^d` when disjoint.
    pub witness: Option<PureState>,
    /// The nonzero projectors `P_1, ..., P_{n-1}`, mutually orthogonal.
    pub projector_chain: Vec<CMatrix>,
    /// `P = I - sum P_i`.
    pub remainder: CMatrix,
    /// Number of projectors split off; at most `d`.
    pub iterations: usize,
}

pub(crate) fn check_same_dims(e0: &QuantumChannel, e1: &QuantumChannel) -> Result<()> {
    if e0.dim_in() != e1.dim_in() {
        return Err(Error::DimensionMismatch { what: "channel input", expected: e0.dim_in(), got: e1.dim_in() });
    }
    if e0.dim_out() != e1.dim_out() {
        return Err(Error::DimensionMismatch { what: "channel output", expected: e0.dim_out(), got: e1.dim_out() });
    }
    Ok(())
}

/// Projector onto the eigenvectors of a positive `x` with eigenvalue above
/// `RANK_TOL * lambda_max`.
fn support_of(x: &CMatrix) -> CMatrix {
    let (vals, vecs) = linalg::hermitian_eigen(x);
    let top = vals.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return CMatrix::zeros(x.nrows(), x.ncols());
    }
    let r = vals.iter().take_while(|&&v| v > RANK_TOL * top).count();
    linalg::projector_onto(&vecs.columns(0, r).into_owned())
}

pub fn ea_disjoint(e0: &QuantumChannel, e1: &QuantumChannel) -> Result<DisjointnessReport> {
    check_same_dims(e0, e1)?;
    let d = e0.dim_in();
    let mut remainder = linalg::identity(d);
    let mut chain: Vec<CMatrix> = Vec::new();
    while chain.len() < d {
        let k0: Vec<CMatrix> = e0.kraus().iter().map(|k| k * &remainder).collect();
        let k1: Vec<CMatrix> = e1.kraus().iter().map(|k| k * &remainder).collect();
        let s0 = span::span_from(&k0)?;
        let s1 = span::span_from(&k1)?;
        let inter = span::intersect(&s0, &s1)?;
        if inter.is_zero() {
            break;
        }
        let x = inter.basis().iter().fold(CMatrix::zeros(d, d), |acc, dk| acc + dk.adjoint() * dk);
        let p = support_of(&(&remainder * x * &remainder));
        if linalg::hs_norm(&p) < 0.5 {
            break;
        }
        remainder = linalg::hermitian_part(&(&remainder - &p));
        chain.push(p);
    }
    let rank = remainder.trace().re;
    let disjoint = rank > 0.5;
    let witness = if disjoint {
        let v = linalg::apply_right_factor(&remainder, max_entangled(d).amplitudes(), d);
        Some(PureState::normalized(v)?)
    } else {
        None
    };
    let iterations = chain.len();
    Ok(DisjointnessReport { disjoint, witness, projector_chain: chain, remainder, iterations })
}

/// Checks that `(I (x) E0)(psi)` and `(I (x) E1)(psi)` have supports that
/// meet only in zero, with the ancilla of dimension `psi.dim() / d`.
pub fn verify_witness(e0: &QuantumChannel, e1: &QuantumChannel, psi: &PureState) -> Result<bool> {
    check_same_dims(e0, e1)?;
    let d = e0.dim_in();
    if psi.dim() % d != 0 {
        return Err(Error::DimensionMismatch { what: "witness dimension", expected: d * d, got: psi.dim() });
    }
    let d_r = psi.dim() / d;
    let rho0 = e0.apply_pure_extended(psi, d_r)?;
    let rho1 = e1.apply_pure_extended(psi, d_r)?;
    let f = fidelity::max_fidelity(&rho0, &rho1)?;
    let u0 = rho0.support_basis();
    let u1 = rho1.support_basis();
    let mut stacked = CMatrix::zeros(u0.nrows(), u0.ncols() + u1.ncols());
    stacked.view_mut((0, 0), u0.shape()).copy_from(u0);
    stacked.view_mut((0, u0.ncols()), u1.shape()).copy_from(&(-u1));
    let shared = linalg::null_space(&stacked, RANK_TOL).ncols();
    Ok(f < 1.0 - WITNESS_TOL && shared == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantcore::linalg::real;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
    }

    fn amplitude_damping(gamma: f64) -> QuantumChannel {
        let s = (1.0 - gamma).sqrt();
        let g = gamma.sqrt();
        QuantumChannel::new(vec![
            CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(s)]),
            CMatrix::from_row_slice(2, 2, &[real(0.0), real(g), real(0.0), real(0.0)]),
        ])
        .unwrap()
    }

    #[test]
    fn identity_vs_flip() {
        let id = QuantumChannel::identity(2);
        let x = QuantumChannel::isometry(pauli_x()).unwrap();
        let rep = ea_disjoint(&id, &x).unwrap();
        assert!(rep.disjoint);
        assert!(rep.projector_chain.is_empty());
        let w = rep.witness.unwrap();
        assert!((w.inner(&max_entangled(2)).norm() - 1.0).abs() < 1e-12);
        assert!(verify_witness(&id, &x, &w).unwrap());
    }

    #[test]
    fn equal_channels_are_not_disjoint() {
        let ad = amplitude_damping(0.3);
        let rep = ea_disjoint(&ad, &ad).unwrap();
        assert!(!rep.disjoint);
        assert!(rep.witness.is_none());
        assert!(rep.iterations <= 2);
        assert!(!verify_witness(&ad, &ad, &max_entangled(2)).unwrap());
    }

    #[test]
    fn identity_vs_amplitude_damping() {
        let id = QuantumChannel::identity(2);
        let ad = amplitude_damping(0.5);
        let rep = ea_disjoint(&id, &ad).unwrap();
        assert!(rep.disjoint);
        assert_eq!(rep.iterations, 0);
        let w = rep.witness.unwrap();
        assert!((w.inner(&max_entangled(2)).norm() - 1.0).abs() < 1e-12);
        assert!(verify_witness(&id, &ad, &w).unwrap());
    }

    fn ket_bra(i: usize, j: usize, c: f64) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        m[(i, j)] = real(c);
        m
    }

    #[test]
    fn shared_kraus_direction_is_split_off() {
        // span{|0><0|, |1><1|} and span{|0><0|, |1><0|, |0><1|} share |0><0|.
        // After restricting to |1>, the remaining operators |1><1| and
        // |0><1| are independent, so the witness is |1>|1>.
        let q = 0.5f64.sqrt();
        let e0 = QuantumChannel::new(vec![ket_bra(0, 0, q), ket_bra(0, 0, q) + ket_bra(1, 1, 1.0)]).unwrap();
        let e1 = QuantumChannel::new(vec![ket_bra(0, 0, q), ket_bra(1, 0, q), ket_bra(0, 1, 1.0)]).unwrap();
        let rep = ea_disjoint(&e0, &e1).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!((&rep.projector_chain[0] - ket_bra(0, 0, 1.0)).norm() < 1e-9);
        assert!((&rep.remainder - ket_bra(1, 1, 1.0)).norm() < 1e-9);
        assert!(rep.disjoint);
        let w = rep.witness.unwrap();
        assert!((w.inner(&PureState::basis(4, 3)).norm() - 1.0).abs() < 1e-9);
        assert!(verify_witness(&e0, &e1, &w).unwrap());
        assert!(!verify_witness(&e0, &e1, &PureState::basis(4, 0)).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let a = QuantumChannel::identity(2);
        let b = QuantumChannel::identity(3);
        assert!(ea_disjoint(&a, &b).is_err());
    }
}
