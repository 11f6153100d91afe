//! Perfect discrimination of two channels with finitely many queries.
//!
//! Two channels can be told apart with certainty iff they are
//! entanglement-assisted disjoint and `I` lies outside
//! `span{E0i^dag E1j}`. The protocol built here queries the unknown
//! channel `N` times in parallel on a disjointness witness, compresses the
//! `N` outputs into one of two fixed pure states, and queries once more so
//! that the two hypotheses give orthogonal outputs.

mod tensor_power;

pub use tensor_power::{TensorPowerTransform, DENSE_DIM_CAP, TYPE_CLASS_CAP};

use crate::disjoint::{self, DisjointnessReport};
use crate::error::{Error, Result};
use crate::fidelity;
use crate::quantcore::linalg::{self, CMatrix};
use crate::quantcore::{extend_with_ancilla, max_entangled, support_projector, DensityOperator, PureState, QuantumChannel};
use crate::span;

/// `f` at or below this is treated as zero (orthogonal one-query outputs).
pub const ZERO_FIDELITY_TOL: f64 = 1e-12;

/// Final-pair overlap at or above `1 - UNIT_OVERLAP_TOL` needs no transform.
pub const UNIT_OVERLAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DistinguishabilityVerdict {
    pub distinguishable: bool,
    /// Entanglement-assisted disjointness.
    pub condition_i: bool,
    /// `I` outside `span{E0i^dag E1j}`.
    pub condition_ii: bool,
    pub disjointness: DisjointnessReport,
    /// Relative distance of `I` from `span{E0i^dag E1j}`.
    pub identity_residual: f64,
}

pub fn check_distinguishable(e0: &QuantumChannel, e1: &QuantumChannel) -> Result<DistinguishabilityVerdict> {
    let disjointness = disjoint::ea_disjoint(e0, e1)?;
    let membership = span::contains(&product_span(e0, e1)?, &linalg::identity(e0.dim_in()))?;
    let condition_i = disjointness.disjoint;
    let condition_ii = !membership.contained;
    Ok(DistinguishabilityVerdict {
        distinguishable: condition_i && condition_ii,
        condition_i,
        condition_ii,
        disjointness,
        identity_residual: membership.residual,
    })
}

/// `span{E0i^dag E1j}`.
pub fn product_span(e0: &QuantumChannel, e1: &QuantumChannel) -> Result<span::OperatorSpan> {
    disjoint::check_same_dims(e0, e1)?;
    let products: Vec<CMatrix> =
        e0.kraus().iter().flat_map(|a| e1.kraus().iter().map(move |b| a.adjoint() * b)).collect();
    span::span_from(&products)
}

/// Inputs on `C^d (x) C^d` with nonzero overlap whose one-query outputs
/// are orthogonal.
#[derive(Debug, Clone)]
pub struct FinalPair {
    pub psi0: PureState,
    pub psi1: PureState,
    /// `|<psi0|psi1>|`.
    pub overlap: f64,
    /// `M = I - P(I)`, the component of `I` orthogonal to `span{E0i^dag E1j}`.
    pub m: CMatrix,
}

/// `psi0 = |alpha>` and `psi1 ∝ (I (x) M^dag)|alpha>`. Then
/// `<alpha|(I (x) E0i^dag E1j M^dag)|alpha> = <M, E0i^dag E1j> / d = 0`
/// for all `i, j`, and `<psi0|psi1> ∝ tr(M) = ||M||^2 > 0`.
pub fn find_final_pair(e0: &QuantumChannel, e1: &QuantumChannel) -> Result<FinalPair> {
    let d = e0.dim_in();
    let s = product_span(e0, e1)?;
    let id = linalg::identity(d);
    if span::contains(&s, &id)?.contained {
        let condition_i = disjoint::ea_disjoint(e0, e1)?.disjoint;
        return Err(Error::NotDistinguishable { condition_i, condition_ii: false });
    }
    let m = span::complement_projection(&s, &id)?;
    let alpha = max_entangled(d);
    let psi1 = PureState::normalized(linalg::apply_right_factor(&m.adjoint(), alpha.amplitudes(), d))?;
    let overlap = alpha.inner(&psi1).norm();
    Ok(FinalPair { psi0: alpha, psi1, overlap, m })
}

/// Smallest `N >= 1` with `f^N <= q`, for `0 < f < 1` and `0 < q < 1`.
pub fn copies_needed(f: f64, q: f64) -> usize {
    let ratio = q.ln() / f.ln();
    let mut n = ((ratio - 1e-12).ceil().max(1.0)) as usize;
    while f.powi(n as i32) > q + fidelity::FEASIBILITY_TOL {
        n += 1;
    }
    n
}

#[derive(Debug, Clone)]
pub struct DiscriminationProtocol {
    /// Input `phi` for each of the `N` parallel queries.
    pub witness: PureState,
    /// `N`.
    pub copies: usize,
    /// Maximal fidelity of the one-query outputs on `phi`.
    pub witness_fidelity: f64,
    /// Maps the `N` outputs to `psi0` or `psi1`.
    pub transform: TensorPowerTransform,
    /// Input pair of the last query, on `R (x) Q` with `dim R = d`.
    pub final_pair: (PureState, PureState),
    pub final_overlap: f64,
    /// `{Pi, I - Pi}` with `Pi` the support of `(I (x) E0)(psi0)`.
    pub final_measurement: [CMatrix; 2],
}

impl DiscriminationProtocol {
    pub fn total_queries(&self) -> usize {
        self.copies + 1
    }
}

pub fn build_protocol(e0: &QuantumChannel, e1: &QuantumChannel) -> Result<DiscriminationProtocol> {
    let verdict = check_distinguishable(e0, e1)?;
    if !verdict.distinguishable {
        return Err(Error::NotDistinguishable { condition_i: verdict.condition_i, condition_ii: verdict.condition_ii });
    }
    let d = e0.dim_in();
    let phi = verdict.disjointness.witness.clone().expect("disjoint verdict carries a witness");
    let rho0 = e0.apply_pure_extended(&phi, d)?;
    let rho1 = e1.apply_pure_extended(&phi, d)?;
    let f = fidelity::max_fidelity(&rho0, &rho1)?;

    let (psi0, psi1, q, copies) = if f <= ZERO_FIDELITY_TOL {
        // One query on the witness already separates the hypotheses.
        (phi.clone(), phi.clone(), 1.0, 0)
    } else {
        let pair = find_final_pair(e0, e1)?;
        let n = if pair.overlap >= 1.0 - UNIT_OVERLAP_TOL { 0 } else { copies_needed(f, pair.overlap) };
        (pair.psi0, pair.psi1, pair.overlap, n)
    };
    let transform = TensorPowerTransform::new(&rho0, &rho1, copies, &psi0, &psi1)?;
    let pi = support_projector(&e0.apply_pure_extended(&psi0, d)?);
    let complement = linalg::identity(pi.nrows()) - &pi;
    Ok(DiscriminationProtocol {
        witness: phi,
        copies,
        witness_fidelity: f,
        transform,
        final_pair: (psi0, psi1),
        final_overlap: q,
        final_measurement: [pi, complement],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    /// Guess (0 or 1) when the unknown channel is `E0`.
    pub guess_when_e0: usize,
    /// Guess when the unknown channel is `E1`.
    pub guess_when_e1: usize,
    /// `probabilities[b][k]`: probability of outcome `k` under hypothesis `b`.
    pub probabilities: [[f64; 2]; 2],
    /// Largest probability of the wrong outcome over both hypotheses.
    pub error_bound: f64,
}

fn run_hypothesis(p: &DiscriminationProtocol, e: &QuantumChannel) -> Result<[f64; 2]> {
    let d = e.dim_in();
    let sigma = e.apply_pure_extended(&p.witness, d)?;
    let tau = p.transform.apply_power(&sigma)?;
    let out = extend_with_ancilla(e, d)?.apply(&tau)?;
    let probs = p.final_measurement.clone().map(|m| (m * out.matrix()).trace().re.clamp(0.0, 1.0));
    Ok(probs)
}

/// Runs the protocol under both hypotheses and reports the outcome
/// statistics. The two hypotheses are simulated concurrently.
pub fn simulate_protocol(
    p: &DiscriminationProtocol,
    e0: &QuantumChannel,
    e1: &QuantumChannel,
) -> Result<SimulationReport> {
    disjoint::check_same_dims(e0, e1)?;
    let (r0, r1) = rayon::join(|| run_hypothesis(p, e0), || run_hypothesis(p, e1));
    let probabilities = [r0?, r1?];
    let guess = |pr: [f64; 2]| if pr[0] >= pr[1] { 0 } else { 1 };
    Ok(SimulationReport {
        guess_when_e0: guess(probabilities[0]),
        guess_when_e1: guess(probabilities[1]),
        error_bound: probabilities[0][1].max(probabilities[1][0]),
        probabilities,
    })
}

/// One-query output pair `((I (x) E0)(psi0), (I (x) E1)(psi1))`.
pub fn one_query_outputs(
    e0: &QuantumChannel,
    e1: &QuantumChannel,
    psi0: &PureState,
    psi1: &PureState,
) -> Result<(DensityOperator, DensityOperator)> {
    let d = e0.dim_in();
    let d_r = psi0.dim() / d;
    Ok((e0.apply_pure_extended(psi0, d_r)?, e1.apply_pure_extended(psi1, d_r)?))
}
