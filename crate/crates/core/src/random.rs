//! Seeded random instances: Haar-like states, unitaries, isometries and
//! channels. Used by tests and by the optimizer's start generation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::quantcore::linalg::{self, CMatrix, CVector, C64};
use crate::quantcore::{DensityOperator, PureState, QuantumChannel};

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    let v = CVector::from_fn(dim, |_, _| gaussian_c64(rng));
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

/// Random density operator of the given rank with eigenvalues bounded away
/// from zero (each at least `0.2 / rank`).
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityOperator {
    let q = isometry(rng, rank, dim);
    let weights: Vec<f64> = (0..rank).map(|_| 0.2 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let lam = CMatrix::from_diagonal(&CVector::from_iterator(rank, weights.iter().map(|w| linalg::real(w / total))));
    DensityOperator::new(&q * lam * q.adjoint()).expect("valid by construction")
}

/// Isometry `C^d_in -> C^d_out` (requires `d_out >= d_in`).
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize) -> CMatrix {
    assert!(d_out >= d_in);
    let g = ginibre(rng, d_out, d_in);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Fix column phases so the distribution does not depend on QR sign conventions.
    CMatrix::from_fn(d_out, d_in, |i, j| {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { linalg::real(1.0) };
        q[(i, j)] * phase
    })
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    isometry(rng, d, d)
}

/// Random channel with `n_kraus` operators from a Stinespring isometry.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, n_kraus: usize) -> QuantumChannel {
    let v = isometry(rng, d_in, d_out * n_kraus);
    let kraus = (0..n_kraus).map(|k| v.rows(k * d_out, d_out).into_owned()).collect();
    QuantumChannel::new(kraus).expect("Stinespring blocks are complete")
}
