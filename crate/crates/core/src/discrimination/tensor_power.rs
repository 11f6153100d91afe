//! Two-state transformation on `N` copies without forming `N`-fold tensors.
//!
//! Rotate the single-copy supports so that `<a_i|b_j> = delta_ij s_i`.
//! Products of these vectors diagonalize the cross-Gram matrix of
//! `rho0^{(x)N}` and `rho1^{(x)N}`, so the block decomposition used by
//! [`fidelity::build_transform`] is indexed by words `I` in the block
//! indices, with overlap `prod_k s_{I_k}`. Every quantity the transform
//! needs on an input `sigma^{(x)N}` depends on a word only through its
//! letter counts, so the output is a sum over type classes weighted by
//! multinomial coefficients.

use crate::error::{Error, Result};
use crate::fidelity::{self, SupportPairDecomposition, DEGENERATE_TOL, FEASIBILITY_TOL};
use crate::quantcore::linalg::{self, CMatrix, CVector, C64};
use crate::quantcore::{DensityOperator, PureState, QuantumChannel};

/// Upper limit on the number of type classes summed in [`TensorPowerTransform::apply_power`].
pub const TYPE_CLASS_CAP: f64 = 2e6;

/// Upper limit on the dimension `n^N` for [`TensorPowerTransform::to_channel`].
pub const DENSE_DIM_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct TensorPowerTransform {
    copies: usize,
    single: SupportPairDecomposition,
    t0: CVector,
    t1: CVector,
    target_overlap: f64,
}

impl TensorPowerTransform {
    /// Channel mapping `rho0^{(x)n}` to `t0` and `rho1^{(x)n}` to `t1`.
    pub fn new(
        rho0: &DensityOperator,
        rho1: &DensityOperator,
        copies: usize,
        t0: &PureState,
        t1: &PureState,
    ) -> Result<Self> {
        if t0.dim() != t1.dim() {
            return Err(Error::DimensionMismatch { what: "target dimension", expected: t0.dim(), got: t1.dim() });
        }
        let single = fidelity::support_pair_decompose(rho0, rho1)?;
        let f = single.singulars.first().copied().unwrap_or(0.0);
        let source = if copies == 0 { 1.0 } else { f.powi(copies as i32) };
        let ov = t0.inner(t1);
        let t = ov.norm();
        if source > t + FEASIBILITY_TOL {
            return Err(Error::TransformInfeasible { source_fidelity: source, target_overlap: t });
        }
        let phase = if t > 0.0 { ov.conj() / t } else { linalg::real(1.0) };
        Ok(Self {
            copies,
            single,
            t0: t0.amplitudes().clone(),
            t1: t1.amplitudes() * phase,
            target_overlap: t,
        })
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Dimension of one copy of the input.
    pub fn single_dim(&self) -> usize {
        self.single.dim()
    }

    pub fn output_dim(&self) -> usize {
        self.t0.len()
    }

    pub fn target_overlap(&self) -> f64 {
        self.target_overlap
    }

    /// Single-copy block decomposition.
    pub fn single_copy(&self) -> &SupportPairDecomposition {
        &self.single
    }

    /// First target and the phase-aligned second target.
    pub fn targets(&self) -> (&CVector, &CVector) {
        (&self.t0, &self.t1)
    }

    /// Number of letter-count vectors of length `rank` summing to `copies`.
    pub fn type_class_count(&self) -> f64 {
        let r = self.single.rank();
        if r == 0 || self.copies == 0 {
            return 1.0;
        }
        binomial(self.copies + r - 1, r - 1)
    }

    /// `T(sigma^{(x)N})` for a single-copy state `sigma`.
    pub fn apply_power(&self, sigma: &DensityOperator) -> Result<DensityOperator> {
        if sigma.dim() != self.single_dim() {
            return Err(Error::DimensionMismatch { what: "transform input", expected: self.single_dim(), got: sigma.dim() });
        }
        if self.copies == 0 {
            return Ok(DensityOperator::from_matrix_unchecked(linalg::outer(&self.t0, &self.t0)));
        }
        let classes = self.type_class_count();
        if classes > TYPE_CLASS_CAP {
            return Err(Error::CapExceeded { what: "type classes", value: classes, cap: TYPE_CLASS_CAP });
        }
        let n = self.copies;
        let m = sigma.matrix();
        let dec = &self.single;
        let r = dec.rank();
        let quad = |x: &CVector, y: &CVector| x.dotc(&(m * y));
        let aa: Vec<f64> = (0..r).map(|i| quad(&dec.left.column(i).into_owned(), &dec.left.column(i).into_owned()).re).collect();
        let ab: Vec<C64> = (0..r).map(|i| quad(&dec.left.column(i).into_owned(), &dec.right.column(i).into_owned())).collect();
        let bb: Vec<f64> = (0..r).map(|i| quad(&dec.right.column(i).into_owned(), &dec.right.column(i).into_owned()).re).collect();
        let trace_of = |basis: &CMatrix| -> f64 {
            basis.column_iter().map(|c| quad(&c.into_owned(), &c.into_owned()).re).sum()
        };
        let block_aa: f64 = aa.iter().sum();
        let block_bb: f64 = bb.iter().sum();
        let full_aa = block_aa + trace_of(&dec.left_residual);
        let full_bb = block_bb + trace_of(&dec.right_residual);
        let w0_res = (full_aa.max(0.0).powi(n as i32) - block_aa.max(0.0).powi(n as i32)).max(0.0);
        let w1_res = (full_bb.max(0.0).powi(n as i32) - block_bb.max(0.0).powi(n as i32)).max(0.0);

        let ln_fact = ln_factorials(n);
        let t = self.target_overlap;
        // Coefficients of t0 t0^dag, t0 t1^dag and t1 t1^dag.
        let mut m00 = 0.0;
        let mut m01 = C64::new(0.0, 0.0);
        let mut m11 = 0.0;
        let mut block_trace = 0.0;
        let mut counts = vec![0usize; r];
        for_each_composition(n, r, &mut counts, &mut |counts| {
            let ln_mult = ln_fact[n] - counts.iter().map(|&c| ln_fact[c]).sum::<f64>();
            let lambda = power_product(&dec.singulars, counts);
            let g00 = power_product(&aa, counts);
            let gab = complex_power_product(&ab, counts);
            let gbb = power_product(&bb, counts);
            let w = ln_mult.exp();
            let norm2 = 1.0 - lambda * lambda;
            let g11 = if norm2 > 1e-24 { ((gbb - 2.0 * lambda * gab.re + lambda * lambda * g00) / norm2).max(0.0) } else { 0.0 };
            block_trace += w * (g00 + g11);
            if lambda >= 1.0 - DEGENERATE_TOL {
                m00 += w * (g00 + g11);
                return;
            }
            let norm = norm2.sqrt();
            let g01 = (gab - lambda * g00) / norm;
            let c = if t > 0.0 { (lambda / t).min(1.0) } else { 1.0 };
            let alpha = c / norm;
            let beta = -lambda / norm;
            let gamma2 = (1.0 - c * c).max(0.0) / norm2;
            m00 += w * (g00 + 2.0 * beta * g01.re + beta * beta * g11);
            m01 += (g01 * alpha + alpha * beta * g11) * w;
            m11 += w * (alpha * alpha + gamma2) * g11;
        });
        let complement = (sigma.trace().powi(n as i32) - block_trace - w0_res - w1_res).max(0.0);
        m00 += w0_res + complement;
        m11 += w1_res;
        let out = linalg::outer(&self.t0, &self.t0) * linalg::real(m00)
            + linalg::outer(&self.t0, &self.t1) * m01
            + linalg::outer(&self.t1, &self.t0) * m01.conj()
            + linalg::outer(&self.t1, &self.t1) * linalg::real(m11);
        Ok(DensityOperator::from_matrix_unchecked(out))
    }

    /// Materializes the channel on `(C^n)^{(x)N}` through the dense
    /// construction on explicit tensor powers of the supports.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let dim = self.single_dim().checked_pow(self.copies as u32).unwrap_or(usize::MAX);
        if dim > DENSE_DIM_CAP {
            return Err(Error::CapExceeded { what: "tensor power dimension", value: dim as f64, cap: DENSE_DIM_CAP as f64 });
        }
        let dec = &self.single;
        let mut u0 = CMatrix::from_element(1, 1, linalg::real(1.0));
        let mut u1 = u0.clone();
        let a = concat_columns(&dec.left, &dec.left_residual);
        let b = concat_columns(&dec.right, &dec.right_residual);
        for _ in 0..self.copies {
            u0 = linalg::kron(&u0, &a);
            u1 = linalg::kron(&u1, &b);
        }
        let rho0 = DensityOperator::from_ensemble(&(u0.clone() / linalg::real((u0.ncols() as f64).sqrt())));
        let rho1 = DensityOperator::from_ensemble(&(u1.clone() / linalg::real((u1.ncols() as f64).sqrt())));
        let t0 = PureState::new(self.t0.clone())?;
        let t1 = PureState::new(self.t1.clone())?;
        fidelity::build_transform(&rho0, &rho1, &t0, &t1)
    }
}

fn concat_columns(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// `prod_i x_i^{n_i}` with `0^0 = 1`.
fn power_product(x: &[f64], counts: &[usize]) -> f64 {
    x.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(&v, &c)| v.powi(c as i32)).product()
}

fn complex_power_product(x: &[C64], counts: &[usize]) -> C64 {
    x.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(&v, &c)| v.powi(c as i32)).product()
}

/// Calls `f` on every vector of `r` non-negative integers summing to `n`.
fn for_each_composition(n: usize, r: usize, counts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn rec(pos: usize, left: usize, counts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if pos + 1 == counts.len() {
            counts[pos] = left;
            f(counts);
            return;
        }
        for c in (0..=left).rev() {
            counts[pos] = c;
            rec(pos + 1, left - c, counts, f);
        }
    }
    if r == 0 {
        return;
    }
    debug_assert_eq!(counts.len(), r);
    rec(0, n, counts, f);
}
