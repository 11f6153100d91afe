use proptest::prelude::*;
use qopdist::quantcore::linalg::{self, CMatrix, CVector};
use qopdist::quantcore::{
    apply_channel, channel_from_measurement, extend_with_ancilla, support_projector, Measurement,
};
use qopdist::random;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn min_eigenvalue(m: &CMatrix) -> f64 {
    linalg::hermitian_eigen(m).0.last().copied().unwrap_or(0.0)
}

/// Measurement operators `M_k = B_k S^{-1/2}` with `S = sum B_k^dag B_k`.
fn random_measurement(rng: &mut ChaCha8Rng, d: usize, outcomes: usize) -> Measurement {
    let raw: Vec<CMatrix> = (0..outcomes).map(|_| random::ginibre(rng, d, d)).collect();
    let s = raw.iter().fold(CMatrix::zeros(d, d), |acc, b| acc + b.adjoint() * b);
    let (vals, vecs) = linalg::hermitian_eigen(&s);
    let inv_sqrt = CVector::from_iterator(d, vals.iter().map(|v| linalg::real(1.0 / v.sqrt())));
    let w = &vecs * CMatrix::from_diagonal(&inv_sqrt) * vecs.adjoint();
    Measurement::new(raw.iter().map(|b| b * &w).collect()).unwrap()
}

/// At least enough operators for a Stinespring isometry to exist.
fn kraus_count(rng: &mut ChaCha8Rng, d_in: usize, d_out: usize) -> usize {
    let lo = d_in.div_ceil(d_out);
    rng.random_range(lo..=lo + 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d_in = rng.random_range(1..=4);
        let d_out = rng.random_range(1..=4);
        let n_kraus = kraus_count(&mut rng, d_in, d_out);
        let rank = rng.random_range(1..=d_in);
        let e = random::channel(&mut rng, d_in, d_out, n_kraus);
        let rho = random::density(&mut rng, d_in, rank);
        let out = apply_channel(&e, &rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-9);
        prop_assert!(min_eigenvalue(out.matrix()) >= -1e-9);
    }

    #[test]
    fn measurement_channels_are_complete(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(1..=4);
        let outcomes = rng.random_range(1..=4);
        let e = channel_from_measurement(&random_measurement(&mut rng, d, outcomes));
        prop_assert!(e.completeness_deviation() < 1e-9);
        prop_assert_eq!(e.dim_out(), d * outcomes);
    }

    #[test]
    fn support_projector_fixes_the_state(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(1..=4);
        let rank = rng.random_range(1..=d);
        let rho = random::density(&mut rng, d, rank);
        let p = support_projector(&rho);
        prop_assert!(linalg::max_abs(&(&p * rho.matrix() - rho.matrix())) < 1e-8);
    }

    #[test]
    fn ancilla_extension_acts_locally(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d_r = rng.random_range(1..=3);
        let d = rng.random_range(1..=3);
        let d_out = rng.random_range(1..=3);
        let n_kraus = kraus_count(&mut rng, d, d_out);
        let e = random::channel(&mut rng, d, d_out, n_kraus);
        let rho_r = { let r = rng.random_range(1..=d_r); random::density(&mut rng, d_r, r) };
        let rho_q = { let r = rng.random_range(1..=d); random::density(&mut rng, d, r) };
        let lhs = apply_channel(&extend_with_ancilla(&e, d_r).unwrap(), &rho_r.tensor(&rho_q)).unwrap();
        let rhs = rho_r.tensor(&apply_channel(&e, &rho_q).unwrap());
        prop_assert!(linalg::max_abs(&(lhs.matrix() - rhs.matrix())) < 1e-9);
    }
}
