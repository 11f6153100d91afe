//! JSON file formats. Complex entries are `[re, im]` pairs, matrices are
//! row-major nested arrays and floats are written with 17 significant
//! digits so that a parse followed by a write reproduces the same bytes.

use std::io;

use qopdist::catalog::Kind;
use qopdist::quantcore::linalg::{c64, CMatrix, CVector};
use qopdist::quantcore::{channel_from_measurement, Measurement, QuantumChannel};
use serde::ser::Serialize;
use serde::{Deserialize, Serialize as DeriveSerialize};
use serde_json::ser::Formatter;

use crate::CliError;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;
pub type JsonVector = Vec<[f64; 2]>;

/// Compact JSON with every float as `d.dddddddddddddddde±x`.
struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Scientific notation with 17 significant digits. Non-finite values have
/// no JSON form and are written as `null`.
pub fn format_float(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        "null".into()
    }
}

/// Canonical serialization followed by a newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn vector_to_json(v: &CVector) -> JsonVector {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, what: &str) -> Result<CMatrix, CliError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(CliError::Input(format!("{what}: empty matrix")));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::Input(format!("{what}: rows of unequal length")));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| c64(rows[i][j][0], rows[i][j][1])))
}

pub fn vector_from_json(v: &JsonVector) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|z| c64(z[0], z[1])))
}

/// A channel given by its Kraus operators.
#[derive(Debug, Clone, PartialEq, DeriveSerialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    /// `[dimIn, dimOut]` of every operator.
    pub dims: [usize; 2],
    pub kraus: Vec<JsonMatrix>,
    /// `"channel"` (default), `"isometry"` or `"measurement"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

fn parse_kind(tag: Option<&str>) -> Result<Kind, CliError> {
    match tag {
        None | Some("channel") => Ok(Kind::Channel),
        Some("isometry") => Ok(Kind::Isometry),
        Some("measurement") => Ok(Kind::Measurement),
        Some(other) => Err(CliError::Input(format!("unknown kind {other:?}"))),
    }
}

impl ChannelFile {
    pub fn from_operators(kind: Option<Kind>, operators: &[CMatrix]) -> Self {
        let (rows, cols) = operators.first().map_or((0, 0), |m| m.shape());
        Self {
            dims: [cols, rows],
            kraus: operators.iter().map(matrix_to_json).collect(),
            kind: kind.map(|k| k.tag().to_string()),
        }
    }

    pub fn from_channel(e: &QuantumChannel) -> Self {
        Self::from_operators(None, e.kraus())
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed channel file: {e}")))
    }

    pub fn kind(&self) -> Result<Kind, CliError> {
        parse_kind(self.kind.as_deref())
    }

    /// The operators, checked against `dims`.
    pub fn operators(&self) -> Result<Vec<CMatrix>, CliError> {
        if self.kraus.is_empty() {
            return Err(CliError::Input("kraus: empty operator list".into()));
        }
        let [dim_in, dim_out] = self.dims;
        self.kraus
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let m = matrix_from_json(rows, &format!("kraus[{k}]"))?;
                if m.shape() != (dim_out, dim_in) {
                    return Err(CliError::Input(format!(
                        "kraus[{k}]: shape {}x{} does not match dims [{dim_in}, {dim_out}]",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                Ok(m)
            })
            .collect()
    }

    /// The channel, with the completeness invariant enforced.
    pub fn channel(&self) -> Result<QuantumChannel, CliError> {
        let ops = self.operators()?;
        let invalid = |e: qopdist::Error| CliError::Input(format!("invariant violated: {e}"));
        match self.kind()? {
            Kind::Channel => QuantumChannel::new(ops).map_err(invalid),
            Kind::Isometry => {
                if ops.len() != 1 {
                    return Err(CliError::Input(format!("isometry: expected one operator, got {}", ops.len())));
                }
                QuantumChannel::isometry(ops.into_iter().next().expect("one operator")).map_err(invalid)
            }
            Kind::Measurement => Ok(channel_from_measurement(&Measurement::new(ops).map_err(invalid)?)),
        }
    }
}

/// A bare square operator for the q-range command.
#[derive(Debug, Clone, PartialEq, DeriveSerialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub matrix: JsonMatrix,
}

/// Everything needed to rerun a protocol. The `N`-copy transform is stored
/// through its single-copy inputs and its targets, from which it is rebuilt.
#[derive(Debug, Clone, PartialEq, DeriveSerialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProtocolFile {
    pub copies: usize,
    pub total_queries: usize,
    /// Input of each of the `N` parallel queries, ancilla first.
    pub witness: JsonVector,
    pub witness_fidelity: f64,
    /// One-query outputs on the witness under each hypothesis.
    pub witness_outputs: [JsonMatrix; 2],
    /// Input pair of the last query, also the transform targets.
    pub final_pair: [JsonVector; 2],
    pub final_overlap: f64,
    pub final_measurement: [JsonMatrix; 2],
    /// Dense Kraus operators of the transform when they are small.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform_kraus: Option<Vec<JsonMatrix>>,
}
