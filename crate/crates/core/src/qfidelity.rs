//! q-maximal fidelities by multi-start local search, the sequence
//! `q_0 = 1`, `q_k = F_{q_{k-1}}^{ea}`, its zero threshold `q_max` and the
//! minimal number of queries `N_min`.
//!
//! Input pairs are parameterized by two free vectors `x, y`:
//! `psi0 = x/|x|` and `psi1 = q psi0 + sqrt(1-q^2) psi_perp` with `psi_perp`
//! the normalized part of `y` orthogonal to `psi0`. The overlap is then
//! exactly the real number `q`. Each start runs a (1+1) evolution strategy
//! with the one-fifth step rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::disjoint::check_same_dims;
use crate::error::{Error, Result};
use crate::fidelity;
use crate::quantcore::linalg::{self, CMatrix, CVector, RANK_TOL};
use crate::quantcore::{extend_with_ancilla, PureState, QuantumChannel};
use crate::random;

/// Largest number of sequence terms computed by [`q_sequence`].
pub const MAX_K_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct QFidOptions {
    pub starts: usize,
    pub seed: u64,
    /// Iteration limit per start.
    pub max_iterations: usize,
    /// A start has converged when its best value improved by less than
    /// `stall_tolerance` over the last `stall_window` steps.
    pub stall_window: usize,
    pub stall_tolerance: f64,
    /// Values below this count as zero.
    pub zero_tolerance: f64,
    /// Width of the final bracket for `q_max`.
    pub bisection_tolerance: f64,
    pub k_cap: usize,
}

impl Default for QFidOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            seed: 0,
            max_iterations: 6000,
            stall_window: 50,
            stall_tolerance: 1e-9,
            zero_tolerance: 1e-6,
            bisection_tolerance: 1e-4,
            k_cap: MAX_K_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerDiagnostics {
    pub starts: usize,
    /// Objective evaluations summed over all starts.
    pub iterations: usize,
    /// Best value after each start, in start order.
    pub best_seen: Vec<f64>,
    /// Every start met the stall criterion before the iteration limit.
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct QFidResult {
    pub value: f64,
    /// Canonical phase.
    pub psi0: PureState,
    /// Phase chosen so that `<psi0|psi1> = q`.
    pub psi1: PureState,
    pub diagnostics: OptimizerDiagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSequence {
    /// `q_0 = 1, q_1, ...`; stops after the first zero or at the cap.
    pub values: Vec<f64>,
    /// First `k >= 1` with `q_k = 0`.
    pub n_min: Option<usize>,
    pub q_max: f64,
    /// `ceil(ln q_max / ln q_1)` when `0 < q_1 < 1` and `q_max > 0`.
    pub upper_bound: Option<usize>,
}

/// Outcome of [`n_min`].
#[derive(Debug, Clone, PartialEq)]
pub struct NMinReport {
    pub distinguishable: bool,
    pub n_min: Option<usize>,
    pub upper_bound: Option<usize>,
    pub q1: f64,
    pub q_max: f64,
    /// `q_0, ..., q_{n_min - 1}` or the capped prefix.
    pub values: Vec<f64>,
}

/// Orthonormal basis of the column span, with the same cutoff as the
/// support of [`crate::quantcore::DensityOperator::from_ensemble`].
fn span_basis(v: &CMatrix) -> CMatrix {
    if v.ncols() == 1 {
        let n = v.norm();
        return if n > 0.0 { v / linalg::real(n) } else { CMatrix::zeros(v.nrows(), 0) };
    }
    linalg::orthonormal_columns(v, RANK_TOL.sqrt())
}

fn output_vectors(kraus: &[CMatrix], psi: &CVector) -> CMatrix {
    let cols: Vec<CVector> = kraus.iter().map(|k| k * psi).collect();
    CMatrix::from_columns(&cols)
}

/// `max_fidelity(E0(psi0), E1(psi1))` from the output vectors.
fn pair_objective(k0: &[CMatrix], k1: &[CMatrix], psi0: &CVector, psi1: &CVector) -> f64 {
    let q0 = span_basis(&output_vectors(k0, psi0));
    let q1 = span_basis(&output_vectors(k1, psi1));
    if q0.ncols() == 0 || q1.ncols() == 0 {
        return 0.0;
    }
    let cross = q0.adjoint() * q1;
    if cross.len() == 1 {
        return cross[(0, 0)].norm().min(1.0);
    }
    linalg::spectral_norm(&cross).min(1.0)
}

/// Inputs with `<psi0|psi1> = q` from free parameters `x`, `y`.
fn pair_from_params(x: &CVector, y: &CVector, q: f64) -> Option<(CVector, CVector)> {
    let nx = x.norm();
    if nx < 1e-300 {
        return None;
    }
    let psi0 = x / linalg::real(nx);
    if q >= 1.0 {
        return Some((psi0.clone(), psi0));
    }
    let perp = y - &psi0 * psi0.dotc(y);
    let np = perp.norm();
    if np < 1e-12 {
        return None;
    }
    let psi1 = &psi0 * linalg::real(q) + perp * linalg::real((1.0 - q * q).sqrt() / np);
    Some((psi0, psi1))
}

struct StartResult {
    value: f64,
    x: CVector,
    y: CVector,
    iterations: usize,
    converged: bool,
}

/// Minimizes `f(x, y)` over pairs of vectors in `C^n` from one random start.
fn run_start(
    n: usize,
    f: &(impl Fn(&CVector, &CVector) -> f64 + Sync),
    rng: &mut ChaCha8Rng,
    opts: &QFidOptions,
    stop_below: f64,
) -> StartResult {
    let gauss = |rng: &mut ChaCha8Rng| CVector::from_fn(n, |_, _| random::gaussian_c64(rng));
    let mut x = gauss(rng);
    let mut y = gauss(rng);
    x /= linalg::real(x.norm());
    y /= linalg::real(y.norm());
    let mut value = f(&x, &y);
    let mut sigma = 0.3;
    let mut history = vec![value];
    let mut converged = false;
    let mut iterations = 1;
    while iterations < opts.max_iterations {
        if value < stop_below {
            converged = true;
            break;
        }
        let cx = &x + gauss(rng) * linalg::real(sigma);
        let cy = &y + gauss(rng) * linalg::real(sigma);
        let cand = f(&cx, &cy);
        iterations += 1;
        if cand < value {
            value = cand;
            x = &cx / linalg::real(cx.norm().max(1e-300));
            y = &cy / linalg::real(cy.norm().max(1e-300));
            sigma = (sigma * 1.5).min(1.0);
        } else {
            sigma *= 1.5f64.powf(-0.25);
        }
        history.push(value);
        let w = opts.stall_window;
        if history.len() > w && history[history.len() - 1 - w] - value < opts.stall_tolerance {
            converged = true;
            break;
        }
        if sigma < 1e-14 {
            converged = true;
            break;
        }
    }
    StartResult { value, x, y, iterations, converged }
}

/// Multi-start minimization. Starts run in parallel with independent
/// streams; the best is chosen in start order, so the result does not
/// depend on scheduling.
fn minimize(
    n: usize,
    f: impl Fn(&CVector, &CVector) -> f64 + Sync,
    opts: &QFidOptions,
    stop_below: f64,
) -> (StartResult, OptimizerDiagnostics) {
    let starts = opts.starts.max(1);
    let results: Vec<StartResult> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            run_start(n, &f, &mut rng, opts, stop_below)
        })
        .collect();
    let mut best_seen = Vec::with_capacity(starts);
    let mut best_idx = 0;
    for (k, r) in results.iter().enumerate() {
        if r.value < results[best_idx].value {
            best_idx = k;
        }
        best_seen.push(results[best_idx].value);
    }
    let diagnostics = OptimizerDiagnostics {
        starts,
        iterations: results.iter().map(|r| r.iterations).sum(),
        best_seen,
        converged: results.iter().all(|r| r.converged),
    };
    let best = results.into_iter().nth(best_idx).expect("at least one start");
    (best, diagnostics)
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("overlap q = {q} outside [0, 1]")));
    }
    Ok(())
}

fn q_fidelity_stop(e0: &QuantumChannel, e1: &QuantumChannel, q: f64, opts: &QFidOptions, stop_below: f64) -> Result<QFidResult> {
    check_same_dims(e0, e1)?;
    check_q(q)?;
    let (k0, k1) = (e0.kraus(), e1.kraus());
    let objective = |x: &CVector, y: &CVector| match pair_from_params(x, y, q) {
        Some((a, b)) => pair_objective(k0, k1, &a, &b),
        None => f64::INFINITY,
    };
    let (best, diagnostics) = minimize(e0.dim_in(), objective, opts, stop_below);
    let (a, b) = pair_from_params(&best.x, &best.y, q).expect("best start has finite value");
    let phase = a.iter().find(|z| z.norm() > 1e-10).map(|z| z.conj() / z.norm()).unwrap_or(linalg::real(1.0));
    let (a, b) = (a * phase, b * phase);
    let psi0 = PureState::normalized(a)?;
    let psi1 = PureState::normalized_keep_phase(b)?;
    let value = fidelity::max_fidelity(&e0.apply_pure(&psi0)?, &e1.apply_pure(&psi1)?)?;
    Ok(QFidResult { value, psi0, psi1, diagnostics })
}

/// `min { F(E0(psi0), E1(psi1)) : <psi0|psi1> = q }` over pure inputs.
pub fn q_fidelity(e0: &QuantumChannel, e1: &QuantumChannel, q: f64, opts: &QFidOptions) -> Result<QFidResult> {
    q_fidelity_stop(e0, e1, q, opts, f64::NEG_INFINITY)
}

/// [`q_fidelity`] of `I_R (x) E0` and `I_R (x) E1` with `dim R = d`.
pub fn q_fidelity_ea(e0: &QuantumChannel, e1: &QuantumChannel, q: f64, opts: &QFidOptions) -> Result<QFidResult> {
    q_fidelity_ea_stop(e0, e1, q, opts, f64::NEG_INFINITY)
}

/// Outputs of inputs with a nontrivial ancilla part are full rank almost
/// everywhere, so random search rarely reaches product inputs. Those are
/// scanned separately: `a0 (x) phi0`, `a1 (x) phi1` with `<a0|a1> = q/t` and
/// `<phi0|phi1> = t` give `(q/t) F_t`, for `t` on a grid over `[q, 1]`.
fn q_fidelity_ea_stop(e0: &QuantumChannel, e1: &QuantumChannel, q: f64, opts: &QFidOptions, stop_below: f64) -> Result<QFidResult> {
    check_same_dims(e0, e1)?;
    check_q(q)?;
    let d = e0.dim_in();
    let (x0, x1) = (extend_with_ancilla(e0, d)?, extend_with_ancilla(e1, d)?);
    let mut best: Option<QFidResult> = None;
    let mut iterations = 0;
    for t in product_grid(q, d) {
        let threshold = if q > 0.0 { stop_below * t / q } else { stop_below };
        let r = q_fidelity_stop(e0, e1, t, opts, threshold)?;
        iterations += r.diagnostics.iterations;
        let s = if t > 0.0 { q / t } else { 1.0 };
        let mut a0 = CVector::zeros(d);
        let mut a1 = CVector::zeros(d);
        a0[0] = linalg::real(1.0);
        a1[0] = linalg::real(s);
        if d > 1 {
            a1[1] = linalg::real((1.0 - s * s).max(0.0).sqrt());
        }
        let psi0 = PureState::normalized(kron_vec(&a0, r.psi0.amplitudes()))?;
        let psi1 = PureState::normalized_keep_phase(kron_vec(&a1, r.psi1.amplitudes()))?;
        let value = fidelity::max_fidelity(&x0.apply_pure(&psi0)?, &x1.apply_pure(&psi1)?)?;
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(QFidResult { value, psi0, psi1, diagnostics: r.diagnostics });
        }
        if value < stop_below {
            break;
        }
    }
    let mut best = best.expect("grid is nonempty");
    if best.value >= stop_below {
        let r = q_fidelity_stop(&x0, &x1, q, opts, stop_below)?;
        iterations += r.diagnostics.iterations;
        if r.value < best.value {
            best = r;
        }
    }
    best.diagnostics.iterations = iterations;
    Ok(best)
}

/// `t` values for the product scan: `q` and every multiple of
/// `1/PRODUCT_STEPS` above it. Only `t = q` when the ancilla is trivial.
fn product_grid(q: f64, d: usize) -> Vec<f64> {
    let mut out = vec![q];
    if d > 1 {
        out.extend((1..=PRODUCT_STEPS).map(|j| j as f64 / PRODUCT_STEPS as f64).filter(|&t| t > q + 1e-12));
    }
    out
}

const PRODUCT_STEPS: usize = 20;

fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    CVector::from_fn(a.len() * b.len(), |i, _| a[i / b.len()] * b[i % b.len()])
}

/// Whether the assisted q-fidelity is numerically zero; stops at the first
/// start that reaches the zero tolerance.
fn ea_zero_at(e0: &QuantumChannel, e1: &QuantumChannel, q: f64, opts: &QFidOptions) -> Result<bool> {
    let r = q_fidelity_ea_stop(e0, e1, q, opts, opts.zero_tolerance)?;
    Ok(r.value < opts.zero_tolerance)
}

/// Supremum of `{q : F_q^{ea} = 0}`, by bisection. The zero set is
/// downward closed, so it is an interval starting at 0. Returns the largest
/// bracket end at which a zero was found.
pub fn q_max(e0: &QuantumChannel, e1: &QuantumChannel, opts: &QFidOptions) -> Result<f64> {
    check_same_dims(e0, e1)?;
    if ea_zero_at(e0, e1, 1.0, opts)? {
        return Ok(1.0);
    }
    if !ea_zero_at(e0, e1, 0.0, opts)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > opts.bisection_tolerance {
        let mid = 0.5 * (lo + hi);
        if ea_zero_at(e0, e1, mid, opts)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn clamp_zero(v: f64, tol: f64) -> f64 {
    if v < tol {
        0.0
    } else {
        v
    }
}

fn log_upper_bound(q1: f64, q_max: f64, tol: f64) -> Option<usize> {
    (q1 > tol && q1 < 1.0 - tol && q_max > tol && q_max < 1.0).then(|| (q_max.ln() / q1.ln() - 1e-12).ceil().max(1.0) as usize)
}

/// `q_0 = 1`, `q_k = F_{q_{k-1}}^{ea}` up to `k_cap` terms after `q_0`.
pub fn q_sequence(e0: &QuantumChannel, e1: &QuantumChannel, k_cap: usize, opts: &QFidOptions) -> Result<QSequence> {
    check_same_dims(e0, e1)?;
    if k_cap > MAX_K_CAP {
        return Err(Error::InvalidArgument(format!("k_cap = {k_cap} exceeds {MAX_K_CAP}")));
    }
    let mut values = vec![1.0];
    let mut n_min = None;
    for k in 1..=k_cap {
        let prev = values[k - 1];
        let next = clamp_zero(q_fidelity_ea(e0, e1, prev, opts)?.value, opts.zero_tolerance);
        values.push(next);
        if next == 0.0 {
            n_min = Some(k);
            break;
        }
    }
    let q_max = q_max(e0, e1, opts)?;
    let upper_bound = values.get(1).and_then(|&q1| log_upper_bound(q1, q_max, opts.zero_tolerance));
    Ok(QSequence { values, n_min, q_max, upper_bound })
}

/// `N_min = min { k : q_{k-1} <= q_max }`, with the logarithmic upper bound.
/// Not distinguishable when `q_1 = 1` or `q_max = 0`.
pub fn n_min(e0: &QuantumChannel, e1: &QuantumChannel, opts: &QFidOptions) -> Result<NMinReport> {
    check_same_dims(e0, e1)?;
    let tol = opts.zero_tolerance;
    let q1 = clamp_zero(q_fidelity_ea(e0, e1, 1.0, opts)?.value, tol);
    let q_max = q_max(e0, e1, opts)?;
    let mut values = vec![1.0, q1];
    let distinguishable = q1 < 1.0 - tol && q_max > tol;
    if !distinguishable {
        return Ok(NMinReport { distinguishable, n_min: None, upper_bound: None, q1, q_max, values });
    }
    let threshold = q_max + opts.bisection_tolerance;
    let mut n = None;
    for k in 1..=opts.k_cap.max(1) {
        if values[k - 1] <= threshold {
            n = Some(k);
            break;
        }
        if k == values.len() - 1 && k < opts.k_cap {
            let next = clamp_zero(q_fidelity_ea(e0, e1, values[k], opts)?.value, tol);
            values.push(next);
        }
    }
    if let Some(k) = n {
        values.truncate(k);
    }
    let upper_bound = if q1 == 0.0 { None } else { log_upper_bound(q1, q_max, tol) };
    Ok(NMinReport { distinguishable, n_min: n, upper_bound, q1, q_max, values })
}

/// Best-effort search for a single-system input with `F(E0(psi), E1(psi))`
/// below `1 - 1e-6`. `None` does not prove that no such input exists.
pub fn unassisted_disjoint_search(e0: &QuantumChannel, e1: &QuantumChannel, opts: &QFidOptions) -> Result<Option<PureState>> {
    let r = q_fidelity(e0, e1, 1.0, opts)?;
    Ok((r.value < 1.0 - 1e-6).then_some(r.psi0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantcore::linalg::{c64, real};

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
    }

    fn diag_isometry(a: f64, b: f64) -> (QuantumChannel, QuantumChannel) {
        // U0 = I on C^2 -> C^4, U1 with U0^dag U1 = diag(a, b).
        let mut u0 = CMatrix::zeros(4, 2);
        u0[(0, 0)] = real(1.0);
        u0[(1, 1)] = real(1.0);
        let mut u1 = CMatrix::zeros(4, 2);
        u1[(0, 0)] = real(a);
        u1[(2, 0)] = real((1.0 - a * a).sqrt());
        u1[(1, 1)] = real(b);
        u1[(3, 1)] = real((1.0 - b * b).sqrt());
        (QuantumChannel::isometry(u0).unwrap(), QuantumChannel::isometry(u1).unwrap())
    }

    fn opts() -> QFidOptions {
        QFidOptions { starts: 8, ..QFidOptions::default() }
    }

    #[test]
    fn identical_identities_preserve_overlap() {
        let id = QuantumChannel::identity(2);
        for q in [0.0, 0.3, 0.8, 1.0] {
            let r = q_fidelity(&id, &id, q, &opts()).unwrap();
            assert!((r.value - q).abs() < 1e-8, "q = {q}: {}", r.value);
            assert!((r.psi0.inner(&r.psi1) - real(q)).norm() < 1e-8, "{} vs {q}", r.psi0.inner(&r.psi1));
        }
    }

    #[test]
    fn constant_channels_give_one() {
        let sigma = PureState::from_slice(&[real(0.6), c64(0.0, 0.8)]).unwrap();
        let e = QuantumChannel::prepare(2, &sigma);
        for q in [0.0, 0.5, 1.0] {
            assert!((q_fidelity(&e, &e, q, &opts()).unwrap().value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn flip_reaches_zero_at_full_overlap() {
        let id = QuantumChannel::identity(2);
        let x = QuantumChannel::isometry(pauli_x()).unwrap();
        let r = q_fidelity(&id, &x, 1.0, &opts()).unwrap();
        assert!(r.value < 1e-6);
        let w = &r.psi0;
        assert!(w.amplitudes().dotc(&(pauli_x() * w.amplitudes())).norm() < 1e-6);
        assert!(unassisted_disjoint_search(&id, &x, &opts()).unwrap().is_some());
        let seq = q_sequence(&id, &x, 4, &opts()).unwrap();
        assert_eq!(seq.values, vec![1.0, 0.0]);
        assert_eq!(seq.n_min, Some(1));
        assert!((seq.q_max - 1.0).abs() < 1e-12);
        let rep = n_min(&id, &x, &opts()).unwrap();
        assert_eq!(rep.n_min, Some(1));
        assert_eq!(rep.upper_bound, None);
    }

    #[test]
    fn equal_channels_never_separate() {
        let e = random::channel(&mut ChaCha8Rng::seed_from_u64(3), 2, 2, 2);
        let seq = q_sequence(&e, &e, 3, &opts()).unwrap();
        assert!(seq.values.iter().all(|&v| (v - 1.0).abs() < 1e-6));
        assert_eq!(seq.n_min, None);
        assert_eq!(seq.q_max, 0.0);
        assert!(!n_min(&e, &e, &opts()).unwrap().distinguishable);
        assert!(unassisted_disjoint_search(&e, &e, &opts()).unwrap().is_none());
    }

    #[test]
    fn positive_definite_pair_follows_the_ellipse() {
        let (u0, u1) = diag_isometry(0.8, 0.5);
        let r = q_fidelity_ea(&u0, &u1, 1.0, &opts()).unwrap();
        assert!((r.value - 0.5).abs() < 2e-3);
        let r = q_fidelity(&u0, &u1, 0.5, &opts()).unwrap();
        assert!((r.value - 0.175).abs() < 2e-3);
        let qm = q_max(&u0, &u1, &opts()).unwrap();
        assert!((qm - 0.3 / 1.3).abs() < 1e-4, "{qm}");
        let rep = n_min(&u0, &u1, &opts()).unwrap();
        assert_eq!(rep.n_min, Some(3));
        assert_eq!(rep.upper_bound, Some(3));
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e0 = random::channel(&mut rng, 2, 2, 2);
        let e1 = random::channel(&mut rng, 2, 2, 2);
        let o = opts();
        let a = q_fidelity_ea(&e0, &e1, 0.6, &o).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| q_fidelity_ea(&e0, &e1, 0.6, &o).unwrap());
        assert_eq!(a.value, b.value);
        assert_eq!(a.diagnostics, b.diagnostics);
    }

    #[test]
    fn rejects_bad_arguments() {
        let id = QuantumChannel::identity(2);
        assert!(q_fidelity(&id, &id, 1.5, &opts()).is_err());
        assert!(q_sequence(&id, &id, 17, &opts()).is_err());
        assert!(q_fidelity(&id, &QuantumChannel::identity(3), 0.5, &opts()).is_err());
    }
}
