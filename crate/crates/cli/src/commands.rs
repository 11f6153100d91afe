use qopdist::catalog;
use qopdist::discrimination::{self, DiscriminationProtocol, SimulationReport, TensorPowerTransform};
use qopdist::fidelity;
use qopdist::qfidelity::{self, QFidOptions};
use qopdist::qrange::{QRangeModel, QRangeOptions};
use qopdist::quantcore::channel::isometry_deviation;
use qopdist::quantcore::linalg::{CMatrix, C64};
use qopdist::quantcore::{DensityOperator, PureState, QuantumChannel};
use serde::Serialize;

use crate::format::{
    matrix_from_json, matrix_to_json, to_canonical_json, vector_from_json, vector_to_json, ChannelFile, JsonVector,
    MatrixFile, ProtocolFile,
};
use crate::svg;
use crate::CliError;

/// Dense transform Kraus operators are written when `n^N` is at most this.
pub const DENSE_TRANSFORM_DIM: usize = 64;

/// Isometry check on operators read for the q-range command.
pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Residuals {
    /// Relative distance of the identity from the span of `E0i^dag E1j`.
    pub identity: f64,
    /// Projectors split off by the disjointness procedure.
    pub disjointness_iterations: usize,
    /// Maximal fidelity of the one-query outputs on the witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub distinguishable: bool,
    #[serde(rename = "conditionI")]
    pub condition_i: bool,
    #[serde(rename = "conditionII")]
    pub condition_ii: bool,
    pub residuals: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<JsonVector>,
}

pub fn check(e0: &QuantumChannel, e1: &QuantumChannel) -> Result<CheckReport, CliError> {
    let v = discrimination::check_distinguishable(e0, e1)?;
    let witness_fidelity = match &v.disjointness.witness {
        Some(phi) => {
            let d = e0.dim_in();
            Some(fidelity::max_fidelity(&e0.apply_pure_extended(phi, d)?, &e1.apply_pure_extended(phi, d)?)?)
        }
        None => None,
    };
    Ok(CheckReport {
        distinguishable: v.distinguishable,
        condition_i: v.condition_i,
        condition_ii: v.condition_ii,
        residuals: Residuals {
            identity: v.identity_residual,
            disjointness_iterations: v.disjointness.iterations,
            witness_fidelity,
        },
        witness: v.disjointness.witness.as_ref().map(|w| vector_to_json(w.amplitudes())),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProtocolReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub total_queries: usize,
    pub error_bound: f64,
    /// `probabilities[b][k]`: outcome `k` when the unknown operation is `Eb`.
    pub probabilities: [[f64; 2]; 2],
}

fn protocol_report(p: &DiscriminationProtocol, sim: &SimulationReport) -> ProtocolReport {
    ProtocolReport {
        n: p.copies,
        total_queries: p.total_queries(),
        error_bound: sim.error_bound,
        probabilities: sim.probabilities,
    }
}

pub fn protocol_to_file(p: &DiscriminationProtocol, e0: &QuantumChannel, e1: &QuantumChannel) -> Result<ProtocolFile, CliError> {
    let d = e0.dim_in();
    let rho0 = e0.apply_pure_extended(&p.witness, d)?;
    let rho1 = e1.apply_pure_extended(&p.witness, d)?;
    let dense = p.transform.single_dim().checked_pow(p.copies as u32).is_some_and(|n| n <= DENSE_TRANSFORM_DIM);
    let transform_kraus = if dense && p.copies > 0 {
        Some(p.transform.to_channel()?.kraus().iter().map(matrix_to_json).collect())
    } else {
        None
    };
    Ok(ProtocolFile {
        copies: p.copies,
        total_queries: p.total_queries(),
        witness: vector_to_json(p.witness.amplitudes()),
        witness_fidelity: p.witness_fidelity,
        witness_outputs: [matrix_to_json(rho0.matrix()), matrix_to_json(rho1.matrix())],
        final_pair: [vector_to_json(p.final_pair.0.amplitudes()), vector_to_json(p.final_pair.1.amplitudes())],
        final_overlap: p.final_overlap,
        final_measurement: [matrix_to_json(&p.final_measurement[0]), matrix_to_json(&p.final_measurement[1])],
        transform_kraus,
    })
}

/// Rebuilds the protocol, including its factored transform, from a file.
pub fn protocol_from_file(f: &ProtocolFile) -> Result<DiscriminationProtocol, CliError> {
    let state = |v: &JsonVector, what: &str| {
        PureState::new(vector_from_json(v)).map_err(|e| CliError::Input(format!("{what}: {e}")))
    };
    let density = |m, what: &str| -> Result<DensityOperator, CliError> {
        DensityOperator::new(matrix_from_json(m, what)?).map_err(|e| CliError::Input(format!("{what}: {e}")))
    };
    let witness = state(&f.witness, "witness")?;
    let psi0 = state(&f.final_pair[0], "finalPair[0]")?;
    let psi1 = state(&f.final_pair[1], "finalPair[1]")?;
    let rho0 = density(&f.witness_outputs[0], "witnessOutputs[0]")?;
    let rho1 = density(&f.witness_outputs[1], "witnessOutputs[1]")?;
    let transform = TensorPowerTransform::new(&rho0, &rho1, f.copies, &psi0, &psi1)?;
    Ok(DiscriminationProtocol {
        witness,
        copies: f.copies,
        witness_fidelity: f.witness_fidelity,
        transform,
        final_pair: (psi0, psi1),
        final_overlap: f.final_overlap,
        final_measurement: [
            matrix_from_json(&f.final_measurement[0], "finalMeasurement[0]")?,
            matrix_from_json(&f.final_measurement[1], "finalMeasurement[1]")?,
        ],
    })
}

/// Builds and simulates the protocol. Fails with a negative verdict when
/// the pair is not perfectly distinguishable.
pub fn protocol(e0: &QuantumChannel, e1: &QuantumChannel) -> Result<(ProtocolFile, ProtocolReport), CliError> {
    let p = discrimination::build_protocol(e0, e1)?;
    let sim = discrimination::simulate_protocol(&p, e0, e1)?;
    Ok((protocol_to_file(&p, e0, e1)?, protocol_report(&p, &sim)))
}

/// Simulates a protocol read back from a file.
pub fn simulate(f: &ProtocolFile, e0: &QuantumChannel, e1: &QuantumChannel) -> Result<ProtocolReport, CliError> {
    let p = protocol_from_file(f)?;
    if p.witness.dim() != e0.dim_in() * e0.dim_in() {
        return Err(CliError::Input("protocol witness does not match the channel dimensions".into()));
    }
    let sim = discrimination::simulate_protocol(&p, e0, e1)?;
    Ok(protocol_report(&p, &sim))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NMinOutput {
    pub q: Vec<f64>,
    pub q_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<usize>,
}

pub fn nmin(e0: &QuantumChannel, e1: &QuantumChannel, k_cap: usize, seed: u64) -> Result<NMinOutput, CliError> {
    let opts = QFidOptions { seed, k_cap, ..QFidOptions::default() };
    let s = qfidelity::q_sequence(e0, e1, k_cap, &opts)?;
    Ok(NMinOutput { q: s.values, q_max: s.q_max, n_min: s.n_min, upper_bound: s.upper_bound })
}

/// Reads the q-range operator: a bare matrix file, a channel file with one
/// square operator, or two single-operator isometry files giving
/// `U0^dag U1`.
pub fn qrange_operator(texts: &[String]) -> Result<CMatrix, CliError> {
    let single_operator = |text: &str| -> Result<CMatrix, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed operator file: {e}")))?;
        if value.get("matrix").is_some() {
            let f: MatrixFile =
                serde_json::from_value(value).map_err(|e| CliError::Input(format!("malformed matrix file: {e}")))?;
            return matrix_from_json(&f.matrix, "matrix");
        }
        let f: ChannelFile =
            serde_json::from_value(value).map_err(|e| CliError::Input(format!("malformed channel file: {e}")))?;
        let mut ops = f.operators()?;
        if ops.len() != 1 {
            return Err(CliError::Input(format!("expected a single operator, got {}", ops.len())));
        }
        Ok(ops.remove(0))
    };
    let a = match texts {
        [one] => single_operator(one)?,
        [first, second] => {
            let (u0, u1) = (single_operator(first)?, single_operator(second)?);
            if u0.shape() != u1.shape() {
                return Err(CliError::Input("isometry pair has different shapes".into()));
            }
            for u in [&u0, &u1] {
                let dev = isometry_deviation(u);
                if dev > ISOMETRY_TOL {
                    return Err(CliError::Input(format!("invariant violated: not an isometry (deviation {dev:.3e})")));
                }
            }
            u0.adjoint() * u1
        }
        _ => return Err(CliError::Input("expected one operator file or an isometry pair".into())),
    };
    if a.nrows() != a.ncols() {
        return Err(CliError::Input(format!(
            "operator is {}x{}; a non-square map needs an isometry pair",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QRangeOutput {
    pub csv: String,
    pub svg: Option<String>,
    pub inner_radius: f64,
}

/// Samples `z` of `W(A)` with the shell height `h(z)` and the smallest
/// modulus on the disk of `W_q(A)` they generate, as CSV rows
/// `z_re, z_im, h, wq_min_modulus` with a closing summary line, and
/// optionally the SVG picture. `points` sets the sampling resolution;
/// repeated rows are written once.
pub fn qrange(a: &CMatrix, q: f64, points: usize, with_svg: bool) -> Result<QRangeOutput, CliError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(CliError::Input(format!("q = {q} outside [0, 1]")));
    }
    let side = ((points.max(4) as f64).sqrt().ceil() as usize).max(2);
    let opts = QRangeOptions { n_polar: side, n_azimuth: side, grid: side, ..QRangeOptions::default() };
    let model = QRangeModel::new(a, &opts)?;
    let inner_radius = QRangeModel::new(a, &QRangeOptions::default())?.inner_radius(q)?;
    let qbar = (1.0 - q * q).max(0.0).sqrt();
    let samples: Vec<(C64, f64, f64)> = model
        .z_samples()
        .into_iter()
        .map(|z| {
            let h = model.h_upper(z);
            (z, h, (q * z.norm() - qbar * (h - z.norm_sqr()).max(0.0).sqrt()).max(0.0))
        })
        .collect();
    let mut csv = String::from("z_re,z_im,h,wq_min_modulus\n");
    let mut seen = std::collections::HashSet::new();
    for (z, h, m) in &samples {
        let row = [z.re, z.im, *h, *m].map(crate::format::format_float).join(",");
        if seen.insert(row.clone()) {
            csv.push_str(&row);
            csv.push('\n');
        }
    }
    csv.push_str(&format!("# q={} inner_radius={}\n", crate::format::format_float(q), crate::format::format_float(inner_radius)));
    let svg = with_svg.then(|| svg::render(&model.hull(), &samples, q));
    Ok(QRangeOutput { csv, svg, inner_radius })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExamplesSummary {
    pub files: Vec<String>,
    pub hiding_orthogonality_residual: f64,
}

/// Canonical JSON for every catalog instance, keyed by file name.
pub fn example_files() -> Vec<(String, String)> {
    catalog::entries()
        .into_iter()
        .map(|e| {
            let file = ChannelFile::from_operators(Some(e.kind), &e.operators);
            (format!("{}.json", e.name), to_canonical_json(&file))
        })
        .collect()
}

pub fn examples_summary(files: &[(String, String)]) -> ExamplesSummary {
    ExamplesSummary {
        files: files.iter().map(|(name, _)| name.clone()).collect(),
        hiding_orthogonality_residual: catalog::hiding_orthogonality_residual(),
    }
}
