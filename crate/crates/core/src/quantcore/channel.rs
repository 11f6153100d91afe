use super::linalg::{self, CMatrix, CVector};
use super::state::{DensityOperator, PureState};
use crate::error::{Error, Result};

/// Tolerance on `sum K^dag K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// A trace-preserving completely positive map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::Empty)?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidArgument("Kraus operator with a zero dimension".into()));
        }
        for k in &kraus {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::DimensionMismatch {
                    what: "Kraus operator shape",
                    expected: dim_out * dim_in,
                    got: k.nrows() * k.ncols(),
                });
            }
            linalg::check_finite(k, "Kraus operator")?;
        }
        let channel = Self { dim_in, dim_out, kraus };
        let dev = channel.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, kraus: vec![linalg::identity(d)] }
    }

    /// Conjugation by an isometry `U` (`U^dag U = I`).
    pub fn isometry(u: CMatrix) -> Result<Self> {
        let dev = isometry_deviation(&u);
        if dev > COMPLETENESS_TOL {
            return Err(Error::NotIsometry(dev));
        }
        Self::new(vec![u])
    }

    /// Discards the input and prepares `psi`.
    pub fn prepare(dim_in: usize, psi: &PureState) -> Self {
        let kraus = (0..dim_in)
            .map(|k| linalg::outer(psi.amplitudes(), &linalg::basis_vector(dim_in, k)))
            .collect();
        Self { dim_in, dim_out: psi.dim(), kraus }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Largest entry of `|sum K^dag K - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let sum = self.kraus.iter().fold(CMatrix::zeros(self.dim_in, self.dim_in), |acc, k| acc + k.adjoint() * k);
        linalg::max_abs(&(sum - linalg::identity(self.dim_in)))
    }

    /// Indices of Kraus operators that vanish identically. They are kept so
    /// that outcome ordering survives, but contribute nothing.
    pub fn zero_kraus_indices(&self) -> Vec<usize> {
        self.kraus.iter().enumerate().filter(|(_, k)| linalg::hs_norm(k) == 0.0).map(|(i, _)| i).collect()
    }

    /// Single Kraus operator with `U^dag U = I`.
    pub fn is_isometry(&self) -> bool {
        self.kraus.len() == 1
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        apply_channel(self, rho)
    }

    /// Output on a pure input, built from the vectors `K_i |psi>`.
    pub fn apply_pure(&self, psi: &PureState) -> Result<DensityOperator> {
        if psi.dim() != self.dim_in {
            return Err(Error::DimensionMismatch { what: "channel input", expected: self.dim_in, got: psi.dim() });
        }
        let cols: Vec<CVector> = self.kraus.iter().map(|k| k * psi.amplitudes()).collect();
        Ok(DensityOperator::from_ensemble(&CMatrix::from_columns(&cols)))
    }

    /// Output of `I_{d_R} (x) E` on a pure input over `C^{d_R} (x) C^{d_in}`,
    /// without forming the lifted Kraus operators.
    pub fn apply_pure_extended(&self, psi: &PureState, d_r: usize) -> Result<DensityOperator> {
        if psi.dim() != d_r * self.dim_in {
            return Err(Error::DimensionMismatch { what: "extended channel input", expected: d_r * self.dim_in, got: psi.dim() });
        }
        let cols: Vec<CVector> =
            self.kraus.iter().map(|k| linalg::apply_right_factor(k, psi.amplitudes(), d_r)).collect();
        Ok(DensityOperator::from_ensemble(&CMatrix::from_columns(&cols)))
    }
}

pub fn isometry_deviation(u: &CMatrix) -> f64 {
    linalg::max_abs(&(u.adjoint() * u - linalg::identity(u.ncols())))
}

/// `E(rho) = sum_i K_i rho K_i^dag`.
pub fn apply_channel(e: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != e.dim_in {
        return Err(Error::DimensionMismatch { what: "channel input", expected: e.dim_in, got: rho.dim() });
    }
    let out = e
        .kraus
        .iter()
        .fold(CMatrix::zeros(e.dim_out, e.dim_out), |acc, k| acc + k * rho.matrix() * k.adjoint());
    Ok(DensityOperator::from_matrix_unchecked(out))
}

/// `I_{d_R} (x) E`, Kraus operators `I (x) K_i`.
pub fn extend_with_ancilla(e: &QuantumChannel, d_r: usize) -> Result<QuantumChannel> {
    if d_r == 0 {
        return Err(Error::InvalidArgument("ancilla dimension must be positive".into()));
    }
    let id = linalg::identity(d_r);
    Ok(QuantumChannel {
        dim_in: d_r * e.dim_in,
        dim_out: d_r * e.dim_out,
        kraus: e.kraus.iter().map(|k| linalg::kron(&id, k)).collect(),
    })
}

/// An ordered measurement `(M_1, ..., M_m)` with `sum M_k^dag M_k = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    operators: Vec<CMatrix>,
}

impl Measurement {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators.first().ok_or(Error::Empty)?;
        let shape = first.shape();
        for m in &operators {
            if m.shape() != shape {
                return Err(Error::DimensionMismatch {
                    what: "measurement operator shape",
                    expected: shape.0 * shape.1,
                    got: m.nrows() * m.ncols(),
                });
            }
            linalg::check_finite(m, "measurement operator")?;
        }
        let sum = operators.iter().fold(CMatrix::zeros(shape.1, shape.1), |acc, m| acc + m.adjoint() * m);
        let dev = linalg::max_abs(&(sum - linalg::identity(shape.1)));
        if dev > COMPLETENESS_TOL {
            return Err(Error::NotComplete(dev));
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn outcomes(&self) -> usize {
        self.operators.len()
    }
}

/// Kraus operators `M_k (x) |k>`: the post-measurement state together with
/// an `m`-level classical register holding the outcome.
pub fn channel_from_measurement(m: &Measurement) -> QuantumChannel {
    let outcomes = m.outcomes();
    let kraus: Vec<CMatrix> = m
        .operators
        .iter()
        .enumerate()
        .map(|(k, op)| {
            let ket = linalg::basis_vector(outcomes, k);
            linalg::kron(op, &CMatrix::from_column_slice(outcomes, 1, ket.as_slice()))
        })
        .collect();
    let (rows, cols) = kraus[0].shape();
    QuantumChannel { dim_in: cols, dim_out: rows, kraus }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantcore::linalg::{c64, real};

    fn pauli(name: char) -> CMatrix {
        let z = real(0.0);
        let o = real(1.0);
        let i = c64(0.0, 1.0);
        match name {
            'I' => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            'X' => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            'Y' => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            _ => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }

    #[test]
    fn identity_channel_is_trivial() {
        let rho = DensityOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[real(0.7), c64(0.1, 0.2), c64(0.1, -0.2), real(0.3)],
        ))
        .unwrap();
        let out = apply_channel(&QuantumChannel::identity(2), &rho).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-15);
    }

    #[test]
    fn bit_flip_on_zero() {
        let e = QuantumChannel::new(vec![pauli('X')]).unwrap();
        let out = e.apply(&PureState::basis(2, 0).density()).unwrap();
        assert!((out.matrix() - PureState::basis(2, 1).density().matrix()).norm() < 1e-15);
    }

    #[test]
    fn pauli_twirl_is_fully_depolarizing() {
        let kraus = ['I', 'X', 'Y', 'Z'].iter().map(|&p| pauli(p) * real(0.5)).collect();
        let e = QuantumChannel::new(kraus).unwrap();
        let psi = PureState::from_slice(&[real(0.6), c64(0.0, 0.8)]).unwrap();
        let out = e.apply(&psi.density()).unwrap();
        assert!((out.matrix() - linalg::identity(2) * real(0.5)).norm() < 1e-15);
    }

    #[test]
    fn input_dimension_is_checked() {
        let e = QuantumChannel::identity(2);
        assert!(matches!(
            apply_channel(&e, &DensityOperator::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let k = pauli('I') * real(1.0 + 1e-3);
        assert!(matches!(QuantumChannel::new(vec![k]), Err(Error::NotTracePreserving(_))));
        assert_eq!(QuantumChannel::new(vec![]), Err(Error::Empty));
    }

    #[test]
    fn ancilla_extension_examples() {
        let id4 = extend_with_ancilla(&QuantumChannel::identity(2), 2).unwrap();
        assert_eq!(id4.kraus()[0], linalg::identity(4));
        let x = QuantumChannel::new(vec![pauli('X')]).unwrap();
        let ext = extend_with_ancilla(&x, 2).unwrap();
        assert_eq!(ext.kraus()[0], linalg::kron(&linalg::identity(2), &pauli('X')));
        assert!(ext.completeness_deviation() < 1e-15);
        assert!(extend_with_ancilla(&x, 0).is_err());
    }

    #[test]
    fn single_operator_measurement_is_identity_with_trivial_register() {
        let m = Measurement::new(vec![linalg::identity(2)]).unwrap();
        let e = channel_from_measurement(&m);
        assert_eq!((e.dim_in(), e.dim_out()), (2, 2));
        assert_eq!(e.kraus()[0], linalg::identity(2));
    }

    #[test]
    fn computational_measurement_on_plus() {
        let p0 = linalg::outer(&linalg::basis_vector(2, 0), &linalg::basis_vector(2, 0));
        let p1 = linalg::outer(&linalg::basis_vector(2, 1), &linalg::basis_vector(2, 1));
        let e = channel_from_measurement(&Measurement::new(vec![p0, p1]).unwrap());
        let plus = PureState::from_slice(&[real(1.0), real(1.0)]).unwrap();
        let out = e.apply(&plus.density()).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-15);
        // System (x) register: weight 1/2 on |0>|0> and |1>|1>.
        assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((out.matrix()[(3, 3)].re - 0.5).abs() < 1e-15);
        assert!(out.matrix()[(0, 3)].norm() < 1e-15);
    }

    #[test]
    fn zero_measurement_operator_is_kept() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(s)]);
        let one = CMatrix::from_row_slice(2, 2, &[real(0.0), real(0.0), real(0.0), real(s)]);
        let m = Measurement::new(vec![d, one, CMatrix::zeros(2, 2)]).unwrap();
        let e = channel_from_measurement(&m);
        assert_eq!(e.kraus().len(), 3);
        assert_eq!(e.dim_out(), 6);
        assert_eq!(e.zero_kraus_indices(), vec![2]);
        assert!(e.completeness_deviation() < 1e-15);
    }

    #[test]
    fn extended_pure_application_matches_dense_route() {
        let ad = QuantumChannel::new(vec![
            CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(0.5f64.sqrt())]),
            CMatrix::from_row_slice(2, 2, &[real(0.0), real(0.5f64.sqrt()), real(0.0), real(0.0)]),
        ])
        .unwrap();
        let psi = crate::quantcore::state::max_entangled(2);
        let fast = ad.apply_pure_extended(&psi, 2).unwrap();
        let dense = extend_with_ancilla(&ad, 2).unwrap().apply(&psi.density()).unwrap();
        assert!((fast.matrix() - dense.matrix()).norm() < 1e-14);
        assert_eq!(fast.rank(), dense.rank());
    }
}
