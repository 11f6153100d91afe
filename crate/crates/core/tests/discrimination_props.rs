use proptest::prelude::*;
use qopdist::discrimination::{build_protocol, check_distinguishable, one_query_outputs, simulate_protocol};
use qopdist::disjoint::{ea_disjoint, verify_witness};
use qopdist::fidelity::{cross_gram, max_fidelity, max_fidelity_tensor_power};
use qopdist::quantcore::linalg::{self, CMatrix};
use qopdist::quantcore::{PureState, QuantumChannel};
use qopdist::random;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pair(rng: &mut ChaCha8Rng, d: usize, d_out: usize) -> (QuantumChannel, QuantumChannel) {
    let lo = d.div_ceil(d_out);
    let n0 = rng.random_range(lo..=lo + 2);
    let n1 = rng.random_range(lo..=lo + 2);
    let e0 = random::channel(rng, d, d_out, n0);
    let e1 = if rng.random_bool(0.2) { e0.clone() } else { random::channel(rng, d, d_out, n1) };
    (e0, e1)
}

/// Inputs on `C^d_r (x) C^d` with `<psi0|psi1>` a random nonzero number.
fn overlapping_inputs(rng: &mut ChaCha8Rng, n: usize) -> (PureState, PureState) {
    loop {
        let a = random::pure_state(rng, n);
        let b = random::pure_state(rng, n);
        if a.inner(&b).norm() > 1e-3 {
            return (a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn disjointness_is_fast_and_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(1..=3);
        let d_out = rng.random_range(1..=4);
        let (e0, e1) = random_pair(&mut rng, d, d_out);
        let r = ea_disjoint(&e0, &e1).unwrap();
        prop_assert!(r.iterations <= d);
        if let Some(w) = &r.witness {
            prop_assert!(verify_witness(&e0, &e1, w).unwrap());
        }
        prop_assert!(!ea_disjoint(&e0, &e0).unwrap().disjoint);
    }

    #[test]
    fn failed_span_condition_keeps_outputs_overlapping(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (e0, e1) = random_pair(&mut rng, 2, 2);
        let v = check_distinguishable(&e0, &e1).unwrap();
        if !v.condition_ii {
            for _ in 0..100 {
                let (a, b) = overlapping_inputs(&mut rng, 4);
                let (r0, r1) = one_query_outputs(&e0, &e1, &a, &b).unwrap();
                prop_assert!((r0.matrix() * r1.matrix()).trace().re > 1e-12);
            }
        }
    }

    #[test]
    fn tensor_power_fidelity(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(2..=3);
        let (k0, k1) = (rng.random_range(1..=d), rng.random_range(1..=d));
        let r0 = random::density(&mut rng, d, k0);
        let r1 = random::density(&mut rng, d, k1);
        let f = max_fidelity(&r0, &r1).unwrap();
        let dense = max_fidelity(&r0.tensor_power(n), &r1.tensor_power(n)).unwrap();
        prop_assert!((dense - f.powi(n as i32)).abs() < 1e-7);
        prop_assert!((max_fidelity_tensor_power(&r0, &r1, n).unwrap() - f.powi(n as i32)).abs() < 1e-9);
        let c = cross_gram(&r0, &r1);
        let mut power = CMatrix::from_element(1, 1, linalg::real(1.0));
        for _ in 0..n {
            power = linalg::kron(&power, &c);
        }
        prop_assert!((linalg::spectral_norm(&power) - linalg::spectral_norm(&c).powi(n as i32)).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn built_protocols_have_zero_error(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(2..=3);
        let (e0, e1) = match rng.random_range(0..3) {
            0 => (
                QuantumChannel::isometry(random::unitary(&mut rng, d)).unwrap(),
                QuantumChannel::isometry(random::unitary(&mut rng, d)).unwrap(),
            ),
            1 => (
                QuantumChannel::isometry(random::isometry(&mut rng, d, d + 1)).unwrap(),
                QuantumChannel::isometry(random::isometry(&mut rng, d, d + 1)).unwrap(),
            ),
            _ => (random::channel(&mut rng, d, 2 * d, 1), random::channel(&mut rng, d, 2 * d, 2)),
        };
        let v = check_distinguishable(&e0, &e1).unwrap();
        prop_assume!(v.distinguishable);
        let p = build_protocol(&e0, &e1).unwrap();
        let sim = simulate_protocol(&p, &e0, &e1).unwrap();
        prop_assert!(sim.error_bound < 1e-7, "N = {}, error {}", p.copies, sim.error_bound);
        prop_assert_eq!((sim.guess_when_e0, sim.guess_when_e1), (0, 1));
    }
}

/// Non-disjoint qubit pairs stay non-disjoint when probed with inputs that
/// carry a four-dimensional ancilla.
#[test]
fn larger_ancilla_finds_no_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut probed = 0;
    while probed < 20 {
        let (e0, e1) = random_pair(&mut rng, 2, 2);
        if ea_disjoint(&e0, &e1).unwrap().disjoint {
            continue;
        }
        probed += 1;
        for _ in 0..50 {
            let psi = random::pure_state(&mut rng, 8);
            assert!(!verify_witness(&e0, &e1, &psi).unwrap());
        }
    }
}
