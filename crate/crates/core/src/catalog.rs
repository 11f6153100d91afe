//! Worked instances: the data-hiding pairs, identity versus bit flip,
//! amplitude damping and isometry pairs with diagonal `U0^dag U1`.

use crate::error::{Error, Result};
use crate::quantcore::linalg::{self, real, CMatrix};
use crate::quantcore::{channel_from_measurement, Measurement, PureState, QuantumChannel};

/// How a Kraus list is meant to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Channel,
    Isometry,
    /// Measurement operators `M_k`, turned into a channel with an outcome
    /// register.
    Measurement,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Channel => "channel",
            Kind::Isometry => "isometry",
            Kind::Measurement => "measurement",
        }
    }
}

/// A named operator list from the catalog.
#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub kind: Kind,
    pub operators: Vec<CMatrix>,
}

impl Entry {
    pub fn channel(&self) -> Result<QuantumChannel> {
        match self.kind {
            Kind::Measurement => Ok(channel_from_measurement(&Measurement::new(self.operators.clone())?)),
            Kind::Isometry => QuantumChannel::isometry(self.operators[0].clone()),
            Kind::Channel => QuantumChannel::new(self.operators.clone()),
        }
    }
}

fn diag(a: f64, b: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(a), real(0.0), real(0.0), real(b)])
}

/// `(|0> + sqrt2 |1>)/sqrt3`.
pub fn hiding_state_0() -> PureState {
    PureState::from_slice(&[real(1.0), real(2f64.sqrt())]).expect("nonzero")
}

/// `(|0> - sqrt2 |1>)/sqrt3`.
pub fn hiding_state_1() -> PureState {
    PureState::from_slice(&[real(1.0), real(-(2f64.sqrt()))]).expect("nonzero")
}

/// Qubit channels preparing [`hiding_state_0`] and [`hiding_state_1`]
/// whatever the input.
pub fn hiding_preparations() -> (QuantumChannel, QuantumChannel) {
    (QuantumChannel::prepare(2, &hiding_state_0()), QuantumChannel::prepare(2, &hiding_state_1()))
}

/// `(|0><0| + |1><1|/sqrt2, |1><1|/sqrt2, 0)` and
/// `(|0><0| + |1><1|/sqrt2, 0, |1><1|/sqrt2)`.
pub fn hiding_measurement_operators() -> (Vec<CMatrix>, Vec<CMatrix>) {
    let s = 0.5f64.sqrt();
    let zero = CMatrix::zeros(2, 2);
    (vec![diag(1.0, s), diag(0.0, s), zero.clone()], vec![diag(1.0, s), zero, diag(0.0, s)])
}

pub fn hiding_measurements() -> (Measurement, Measurement) {
    let (a, b) = hiding_measurement_operators();
    (Measurement::new(a).expect("complete"), Measurement::new(b).expect("complete"))
}

pub fn hiding_measurement_channels() -> (QuantumChannel, QuantumChannel) {
    let (a, b) = hiding_measurements();
    (channel_from_measurement(&a), channel_from_measurement(&b))
}

/// `|tr((|0><0| + |1><1|/2) |psi0><psi1|)|`, zero up to rounding.
pub fn hiding_orthogonality_residual() -> f64 {
    let d = diag(1.0, 0.5);
    let (a, b) = (hiding_state_0(), hiding_state_1());
    (linalg::outer(a.amplitudes(), b.amplitudes()) * d).trace().norm()
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
}

/// Identity and conjugation by `X` on a qubit.
pub fn identity_and_flip() -> (QuantumChannel, QuantumChannel) {
    (QuantumChannel::identity(2), QuantumChannel::isometry(pauli_x()).expect("unitary"))
}

/// Kraus operators `diag(1, sqrt(1-g))` and `sqrt(g) |0><1|`.
pub fn amplitude_damping_operators(gamma: f64) -> Result<Vec<CMatrix>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("damping {gamma} outside [0, 1]")));
    }
    let g = gamma.sqrt();
    Ok(vec![diag(1.0, (1.0 - gamma).sqrt()), CMatrix::from_row_slice(2, 2, &[real(0.0), real(g), real(0.0), real(0.0)])])
}

pub fn amplitude_damping(gamma: f64) -> Result<QuantumChannel> {
    QuantumChannel::new(amplitude_damping_operators(gamma)?)
}

/// Isometries `C^2 -> C^4` with `U0^dag U1 = diag(lambda0, lambda1)`:
/// `U0 = |0><0| + |1><1|` and `U1|k> = lambda_k |k> + sqrt(1-lambda_k^2) |k+2>`.
pub fn diag_isometry_pair(lambda0: f64, lambda1: f64) -> Result<(CMatrix, CMatrix)> {
    for l in [lambda0, lambda1] {
        if !(-1.0..=1.0).contains(&l) {
            return Err(Error::InvalidArgument(format!("overlap {l} outside [-1, 1]")));
        }
    }
    let mut u0 = CMatrix::zeros(4, 2);
    let mut u1 = CMatrix::zeros(4, 2);
    for (k, l) in [lambda0, lambda1].into_iter().enumerate() {
        u0[(k, k)] = real(1.0);
        u1[(k, k)] = real(l);
        u1[(k + 2, k)] = real((1.0 - l * l).sqrt());
    }
    Ok((u0, u1))
}

pub fn diag_isometry_channels(lambda0: f64, lambda1: f64) -> Result<(QuantumChannel, QuantumChannel)> {
    let (u0, u1) = diag_isometry_pair(lambda0, lambda1)?;
    Ok((QuantumChannel::isometry(u0)?, QuantumChannel::isometry(u1)?))
}

/// Every catalog instance under a file-friendly name.
pub fn entries() -> Vec<Entry> {
    let mut out = Vec::new();
    let (p0, p1) = hiding_preparations();
    out.push(Entry { name: "hiding_prepare_0".into(), kind: Kind::Channel, operators: p0.kraus().to_vec() });
    out.push(Entry { name: "hiding_prepare_1".into(), kind: Kind::Channel, operators: p1.kraus().to_vec() });
    let (m0, m1) = hiding_measurement_operators();
    out.push(Entry { name: "hiding_measure_0".into(), kind: Kind::Measurement, operators: m0 });
    out.push(Entry { name: "hiding_measure_1".into(), kind: Kind::Measurement, operators: m1 });
    out.push(Entry { name: "identity".into(), kind: Kind::Isometry, operators: vec![linalg::identity(2)] });
    out.push(Entry { name: "flip_x".into(), kind: Kind::Isometry, operators: vec![pauli_x()] });
    for (tag, gamma) in [("025", 0.25), ("050", 0.5), ("075", 0.75)] {
        out.push(Entry {
            name: format!("amplitude_damping_{tag}"),
            kind: Kind::Channel,
            operators: amplitude_damping_operators(gamma).expect("valid damping"),
        });
    }
    let (u0, u1) = diag_isometry_pair(0.8, 0.5).expect("valid overlaps");
    out.push(Entry { name: "diag_isometry_0".into(), kind: Kind::Isometry, operators: vec![u0] });
    out.push(Entry { name: "diag_isometry_1_080_050".into(), kind: Kind::Isometry, operators: vec![u1] });
    let (_, u1) = diag_isometry_pair(0.8, 0.4).expect("valid overlaps");
    out.push(Entry { name: "diag_isometry_1_080_040".into(), kind: Kind::Isometry, operators: vec![u1] });
    out
}
