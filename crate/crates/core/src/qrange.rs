//! Numerical range, the upper boundary of the Davis-Wielandt shell and the
//! q-numerical range `W_q(A) = {<x|A|y> : <x|y> = q}`.
//!
//! `W_q(A)` is the union of the disks centered at `q z` with radius
//! `sqrt(1-q^2) sqrt(h(z) - |z|^2)` over `z` in `W(A)`, where `h(z)` is the
//! largest `<x|A^dag A|x>` over unit `x` with `<x|A|x> = z`. Its inner
//! radius is therefore the minimum over `z` of
//! `max(0, q|z| - sqrt(1-q^2) sqrt(h(z) - |z|^2))`, which is also the
//! minimum over unit `x` of the same expression with `z = <x|A|x>` and
//! `h = |Ax|^2`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantcore::channel::isometry_deviation;
use crate::quantcore::linalg::{self, c64, CMatrix, CVector, C64};
use crate::random;

/// Relative eigenvalue gap below which a top eigenvalue is degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

/// Grid points re-scored per round with the tightened `h`, and the round cap.
const GRID_TIGHTEN_BATCH: usize = 64;
const GRID_TIGHTEN_ROUNDS: usize = 64;

/// Isometry check for [`isometry_q_fidelity`].
pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QRangeOptions {
    /// Supporting angles for the boundary of `W(A)`.
    pub n_angles: usize,
    /// Polar and azimuthal counts of the hemisphere direction grid.
    pub n_polar: usize,
    pub n_azimuth: usize,
    /// Interior samples per side of the bounding box.
    pub grid: usize,
    /// Local descents started from the best grid region.
    pub refine_starts: usize,
    pub refine_iterations: usize,
}

impl Default for QRangeOptions {
    fn default() -> Self {
        Self { n_angles: 720, n_polar: 64, n_azimuth: 64, grid: 200, refine_starts: 8, refine_iterations: 3000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub z: C64,
    /// `theta` with `z` maximizing `Re(e^{i theta} z)` over `W(A)`.
    pub angle: f64,
}

/// A point `(z, t) = (<x|A|x>, <x|A^dag A|x>)` on the upper boundary of
/// the shell, with its supporting plane `c . (Re z, Im z, t) <= support`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellSample {
    pub z: C64,
    pub h: f64,
    pub direction: [f64; 3],
    pub support: f64,
    pub vector: CVector,
}

#[derive(Debug, Clone)]
pub struct QRangeModel {
    operator: CMatrix,
    boundary: Vec<BoundaryPoint>,
    shell: Vec<ShellSample>,
    options: QRangeOptions,
}

/// Result of [`QRangeModel::inner_radius_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct InnerRadius {
    /// Refined minimum modulus over `W_q(A)`.
    pub value: f64,
    /// Minimum over the sampled `z`, with `h` tightened at the best points.
    pub grid_value: f64,
    /// A unit `x` attaining `value`.
    pub argmin: CVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorIdentityCheck {
    pub single: f64,
    pub lifted: f64,
    pub delta: f64,
}

fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::DimensionMismatch { what: "operator columns", expected: a.nrows(), got: a.ncols() });
    }
    linalg::check_finite(a, "operator")
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("overlap q = {q} outside [0, 1]")));
    }
    Ok(())
}

fn quad(m: &CMatrix, x: &CVector) -> C64 {
    x.dotc(&(m * x))
}

/// Top eigenvectors of a Hermitian matrix: one vector, or a basis of the
/// top eigenspace when it is degenerate.
fn top_eigenspace(h: &CMatrix) -> (f64, CMatrix) {
    let (vals, vecs) = linalg::hermitian_eigen(h);
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let k = vals.iter().take_while(|&&v| vals[0] - v <= DEGENERACY_TOL * scale).count();
    (vals[0], vecs.columns(0, k).into_owned())
}

/// Boundary points of `W(A)` supporting direction `theta`. A degenerate
/// top eigenspace contributes both ends of its face.
fn boundary_points(a: &CMatrix, theta: f64) -> Vec<C64> {
    let e = c64(theta.cos(), theta.sin());
    let h = linalg::hermitian_part(&(a * e));
    let (_, v) = top_eigenspace(&h);
    if v.ncols() == 1 {
        return vec![quad(a, &v.column(0).into_owned())];
    }
    let b = v.adjoint() * a * &v;
    let tangent = linalg::skew_part(&(b * e));
    let (_, w) = linalg::hermitian_eigen(&tangent);
    let last = w.ncols() - 1;
    [0, last].iter().map(|&j| quad(a, &(&v * w.column(j)))).collect()
}

/// `W(A)` approximated by supporting points at `n_angles` equally spaced angles.
pub fn numerical_range(a: &CMatrix, n_angles: usize) -> Result<QRangeModel> {
    check_square(a)?;
    let n = n_angles.max(3);
    let boundary: Vec<BoundaryPoint> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let angle = 2.0 * PI * j as f64 / n as f64;
            boundary_points(a, angle).into_iter().map(move |z| BoundaryPoint { z, angle })
        })
        .collect();
    Ok(QRangeModel { operator: a.clone(), boundary, shell: Vec::new(), options: QRangeOptions { n_angles: n, ..QRangeOptions::default() } })
}

fn shell_sample(a: &CMatrix, re: &CMatrix, im: &CMatrix, ata: &CMatrix, c: [f64; 3]) -> ShellSample {
    let h = re * linalg::real(c[0]) + im * linalg::real(c[1]) + ata * linalg::real(c[2]);
    let (support, v) = top_eigenspace(&h);
    let x = v.column(0).into_owned();
    ShellSample { z: quad(a, &x), h: quad(ata, &x).re, direction: c, support, vector: x }
}

/// Upper boundary of the shell from top eigenvectors of
/// `c1 Re A + c2 Im A + c3 A^dag A` over a hemisphere grid with `c3 > 0`,
/// plus the pole. For `d = 2` and non-normal `A` the shell is an ellipsoid
/// surface rather than a solid, but its upper half is still the upper
/// boundary of its convex hull, so the sweep recovers it.
pub fn shell_upper(a: &CMatrix, n_polar: usize, n_azimuth: usize) -> Result<QRangeModel> {
    check_square(a)?;
    let re = linalg::hermitian_part(a);
    let im = linalg::skew_part(a);
    let ata = a.adjoint() * a;
    let (np, na) = (n_polar.max(1), n_azimuth.max(1));
    let mut dirs = vec![[0.0, 0.0, 1.0]];
    for i in 0..np {
        // Polar angle in (0, pi/2), excluding the equator.
        let pol = 0.5 * PI * (i as f64 + 1.0) / (np as f64 + 1.0);
        for j in 0..na {
            let az = 2.0 * PI * j as f64 / na as f64;
            dirs.push([pol.sin() * az.cos(), pol.sin() * az.sin(), pol.cos()]);
        }
    }
    let shell = dirs.into_par_iter().map(|c| shell_sample(a, &re, &im, &ata, c)).collect();
    Ok(QRangeModel {
        operator: a.clone(),
        boundary: Vec::new(),
        shell,
        options: QRangeOptions { n_polar: np, n_azimuth: na, ..QRangeOptions::default() },
    })
}

/// Convex hull in counter-clockwise order (monotone chain), collinear
/// points dropped. Fewer than three distinct points are returned as is.
pub fn hull(points: &[C64]) -> Vec<C64> {
    let mut p: Vec<C64> = points.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
    if p.len() < 3 {
        return p;
    }
    let cross = |o: C64, a: C64, b: C64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut lower: Vec<C64> = Vec::new();
    for &z in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], z) <= 1e-15 {
            lower.pop();
        }
        lower.push(z);
    }
    let mut upper: Vec<C64> = Vec::new();
    for &z in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], z) <= 1e-15 {
            upper.pop();
        }
        upper.push(z);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Distance from the origin to the convex hull of `poly` (CCW hull order).
fn distance_to_hull(poly: &[C64]) -> f64 {
    match poly.len() {
        0 => return f64::INFINITY,
        1 => return poly[0].norm(),
        _ => {}
    }
    let seg = |a: C64, b: C64| {
        let d = b - a;
        let len2 = d.norm_sqr();
        let t = if len2 > 0.0 { (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0) } else { 0.0 };
        (a + d * t).norm()
    };
    if poly.len() == 2 {
        return seg(poly[0], poly[1]);
    }
    let inside = (0..poly.len()).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        (b - a).re * (-a).im - (b - a).im * (-a).re >= -1e-15
    });
    if inside {
        return 0.0;
    }
    (0..poly.len()).map(|i| seg(poly[i], poly[(i + 1) % poly.len()])).fold(f64::INFINITY, f64::min)
}

/// `max(0, q|z| - qbar sqrt(h - |z|^2))`.
fn disk_distance(z: C64, h: f64, q: f64) -> f64 {
    let qbar = (1.0 - q * q).max(0.0).sqrt();
    (q * z.norm() - qbar * (h - z.norm_sqr()).max(0.0).sqrt()).max(0.0)
}

/// `q|<x|A|x>| - qbar sqrt(|Ax|^2 - |<x|A|x>|^2)` for unit `x`, unclamped.
fn vector_objective(a: &CMatrix, x: &CVector, q: f64) -> f64 {
    let qbar = (1.0 - q * q).max(0.0).sqrt();
    let ax = a * x;
    let z = x.dotc(&ax);
    // |Ax - z x|^2 equals |Ax|^2 - |z|^2 for unit x without the cancellation.
    q * z.norm() - qbar * (ax - x * z).norm()
}

/// Adaptive random descent on the unit sphere from `x0`.
fn refine_vector(f: impl Fn(&CVector) -> f64, x0: CVector, rng: &mut ChaCha8Rng, max_iter: usize) -> (f64, CVector) {
    let n = x0.len();
    let mut x = &x0 / linalg::real(x0.norm());
    let mut value = f(&x);
    let mut sigma = 0.05;
    let mut last_improvement = 0;
    for it in 0..max_iter {
        let step = CVector::from_fn(n, |_, _| random::gaussian_c64(rng)) * linalg::real(sigma);
        let cand = &x + step;
        let cand = &cand / linalg::real(cand.norm());
        let v = f(&cand);
        if v < value {
            if value - v > 1e-13 {
                last_improvement = it;
            }
            value = v;
            x = cand;
            sigma = (sigma * 1.5).min(0.5);
        } else {
            sigma *= 1.5f64.powf(-0.25);
        }
        if sigma < 1e-12 || it - last_improvement > 200 {
            break;
        }
    }
    (value, x)
}

impl QRangeModel {
    /// Boundary and shell with the given grid sizes.
    pub fn new(a: &CMatrix, opts: &QRangeOptions) -> Result<Self> {
        let mut model = numerical_range(a, opts.n_angles)?;
        model.shell = shell_upper(a, opts.n_polar, opts.n_azimuth)?.shell;
        model.options = opts.clone();
        Ok(model)
    }

    pub fn operator(&self) -> &CMatrix {
        &self.operator
    }

    pub fn boundary(&self) -> &[BoundaryPoint] {
        &self.boundary
    }

    pub fn shell(&self) -> &[ShellSample] {
        &self.shell
    }

    pub fn grid_resolution(&self) -> usize {
        self.options.grid
    }

    pub fn options(&self) -> &QRangeOptions {
        &self.options
    }

    /// Convex hull of the boundary samples.
    pub fn hull(&self) -> Vec<C64> {
        hull(&self.boundary.iter().map(|b| b.z).collect::<Vec<_>>())
    }

    /// Largest `|z|` over the boundary samples.
    pub fn radius(&self) -> f64 {
        self.boundary.iter().map(|b| b.z.norm()).fold(0.0, f64::max)
    }

    fn scale(&self) -> f64 {
        linalg::spectral_norm(&self.operator).max(1e-300)
    }

    /// Membership in the sampled `W(A)` through its supporting half-planes.
    pub fn contains(&self, z: C64, tol: f64) -> bool {
        let slack = tol * self.scale();
        self.boundary.iter().all(|b| {
            let e = c64(b.angle.cos(), b.angle.sin());
            (e * z).re <= (e * b.z).re + slack
        })
    }

    /// Smallest upper bound on `h(z)` over the sampled supporting planes,
    /// never below `|z|^2`.
    pub fn h_upper(&self, z: C64) -> f64 {
        let t = self
            .shell
            .iter()
            .map(|s| (s.support - s.direction[0] * z.re - s.direction[1] * z.im) / s.direction[2])
            .fold(f64::INFINITY, f64::min);
        t.max(z.norm_sqr())
    }

    /// `h(z)` from the dual `min_c lambda_max(c1 Re A + c2 Im A + A^dag A) -
    /// c . z`, by gradient descent from the best sampled plane. The gradient
    /// at `c` is `<x|A|x> - z` for the top eigenvector `x`. Never above
    /// [`Self::h_upper`].
    pub fn h_tight(&self, z: C64) -> f64 {
        let upper = self.h_upper(z);
        let Some(start) = self
            .shell
            .iter()
            .filter(|s| s.direction[2] > 1e-3)
            .min_by(|x, y| {
                let g = |s: &ShellSample| (s.support - s.direction[0] * z.re - s.direction[1] * z.im) / s.direction[2];
                g(x).total_cmp(&g(y))
            })
        else {
            return upper;
        };
        let a = &self.operator;
        let (re, im, ata) = (linalg::hermitian_part(a), linalg::skew_part(a), a.adjoint() * a);
        let eval = |c: [f64; 2]| {
            let s = shell_sample(a, &re, &im, &ata, [c[0], c[1], 1.0]);
            (s.support - c[0] * z.re - c[1] * z.im, [s.z.re - z.re, s.z.im - z.im])
        };
        let mut c = [start.direction[0] / start.direction[2], start.direction[1] / start.direction[2]];
        let (mut g, mut grad) = eval(c);
        let mut step = 1.0;
        for _ in 0..200 {
            let norm2 = grad[0] * grad[0] + grad[1] * grad[1];
            if norm2 < 1e-28 {
                break;
            }
            loop {
                let cand = [c[0] - step * grad[0], c[1] - step * grad[1]];
                let (gc, gradc) = eval(cand);
                if gc <= g - 0.5 * step * norm2 {
                    (c, g, grad) = (cand, gc, gradc);
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
            if step < 1e-12 {
                break;
            }
        }
        g.min(upper).max(z.norm_sqr())
    }

    /// Sample points of `W(A)`: boundary, shell samples, hull edges and the
    /// interior of the bounding box.
    pub fn z_samples(&self) -> Vec<C64> {
        let mut out: Vec<C64> = self.boundary.iter().map(|b| b.z).collect();
        out.extend(self.shell.iter().map(|s| s.z));
        let poly = self.hull();
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            for k in 1..16 {
                out.push(a + (b - a) * (k as f64 / 16.0));
            }
        }
        let n = self.options.grid;
        if n >= 2 && !poly.is_empty() {
            let (mut lo, mut hi) = (poly[0], poly[0]);
            for z in &poly {
                lo = c64(lo.re.min(z.re), lo.im.min(z.im));
                hi = c64(hi.re.max(z.re), hi.im.max(z.im));
            }
            let grid: Vec<C64> = (0..n * n)
                .into_par_iter()
                .map(|k| {
                    let (i, j) = (k / n, k % n);
                    c64(
                        lo.re + (hi.re - lo.re) * i as f64 / (n - 1) as f64,
                        lo.im + (hi.im - lo.im) * j as f64 / (n - 1) as f64,
                    )
                })
                .filter(|&z| self.contains(z, 1e-12))
                .collect();
            out.extend(grid);
        }
        out
    }

    pub fn inner_radius(&self, q: f64) -> Result<f64> {
        Ok(self.inner_radius_report(q)?.value)
    }

    /// Grid minimum with the tightened `h` at its best points, refined by
    /// local descent over unit vectors from the shell samples nearest the
    /// best grid points. At `q = 1` the value is the distance from 0 to the hull.
    pub fn inner_radius_report(&self, q: f64) -> Result<InnerRadius> {
        check_q(q)?;
        if self.boundary.is_empty() || self.shell.is_empty() {
            return Err(Error::InvalidArgument("model needs both boundary and shell samples".into()));
        }
        let a = &self.operator;
        let samples = self.z_samples();
        // Envelope scores are lower bounds. The lowest ones are re-scored
        // with the tightened h until the minimum is a tightened score.
        let mut scored: Vec<(f64, C64, bool)> =
            samples.par_iter().map(|&z| (disk_distance(z, self.h_upper(z), q), z, false)).collect();
        for _ in 0..GRID_TIGHTEN_ROUNDS {
            scored.sort_by(|x, y| x.0.total_cmp(&y.0));
            if scored[0].2 {
                break;
            }
            let n = scored.len().min(GRID_TIGHTEN_BATCH);
            scored[..n].par_iter_mut().filter(|s| !s.2).for_each(|s| {
                *s = (disk_distance(s.1, self.h_tight(s.1), q), s.1, true);
            });
        }
        scored.sort_by(|x, y| x.0.total_cmp(&y.0));
        let grid_value = scored[0].0;

        // Seeds: shell vectors ranked by their exact objective and by
        // closeness to the best grid points.
        let best_z: Vec<(f64, C64)> = scored.iter().take(2).map(|s| (s.0, s.1)).collect();
        let mut seeds: Vec<CVector> = Vec::new();
        let mut by_value: Vec<(f64, usize)> =
            self.shell.iter().enumerate().map(|(i, s)| (vector_objective(a, &s.vector, q), i)).collect();
        by_value.sort_by(|x, y| x.0.total_cmp(&y.0));
        seeds.extend(by_value.iter().take(self.options.refine_starts).map(|&(_, i)| self.shell[i].vector.clone()));
        for &(_, z) in best_z.iter().take(2) {
            let mut near: Vec<(f64, usize)> = self.shell.iter().enumerate().map(|(i, s)| ((s.z - z).norm(), i)).collect();
            near.sort_by(|x, y| x.0.total_cmp(&y.0));
            let picked: Vec<&CVector> = near.iter().take(3).map(|&(_, i)| &self.shell[i].vector).collect();
            for (k, v) in picked.iter().enumerate() {
                seeds.push((*v).clone());
                for w in &picked[k + 1..] {
                    let sum = *v + *w;
                    if sum.norm() > 1e-8 {
                        seeds.push(sum);
                    }
                }
            }
        }
        let iters = self.options.refine_iterations;
        let refined: Vec<(f64, CVector)> = seeds
            .into_par_iter()
            .enumerate()
            .map(|(k, x0)| {
                let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
                refine_vector(|x| vector_objective(a, x, q), x0, &mut rng, iters)
            })
            .collect();
        let (mut value, mut argmin) = refined
            .into_iter()
            .reduce(|x, y| if y.0 < x.0 { y } else { x })
            .expect("at least one seed");
        if q >= 1.0 {
            value = distance_to_hull(&self.hull()).min(value.max(0.0));
        }
        if value <= 0.0 {
            value = 0.0;
        }
        argmin /= linalg::real(argmin.norm());
        Ok(InnerRadius { value, grid_value, argmin })
    }

    /// `(z, h(z), min modulus of the disk)` for every shell sample, with
    /// `h` exact at those points.
    pub fn wq_samples(&self, q: f64) -> Vec<(C64, f64, f64)> {
        self.shell.iter().map(|s| (s.z, s.h, disk_distance(s.z, s.h, q))).collect()
    }
}

/// `min { |w| : w in W_q(A) }` with default sampling.
pub fn inner_radius(a: &CMatrix, q: f64, opts: &QRangeOptions) -> Result<f64> {
    check_q(q)?;
    QRangeModel::new(a, opts)?.inner_radius(q)
}

/// Both maps are isometries `C^d -> C^d'`, within [`ISOMETRY_TOL`].
fn check_isometry_pair(u0: &CMatrix, u1: &CMatrix) -> Result<()> {
    if u0.shape() != u1.shape() {
        return Err(Error::DimensionMismatch { what: "isometry shape", expected: u0.len(), got: u1.len() });
    }
    for u in [u0, u1] {
        let dev = isometry_deviation(u);
        if dev > ISOMETRY_TOL {
            return Err(Error::NotIsometry(dev));
        }
    }
    Ok(())
}

/// `F_q(U0, U1)`, the inner radius of `W_q(U0^dag U1)`. The same value is
/// the entanglement-assisted q-fidelity.
pub fn isometry_q_fidelity(u0: &CMatrix, u1: &CMatrix, q: f64, opts: &QRangeOptions) -> Result<f64> {
    check_isometry_pair(u0, u1)?;
    inner_radius(&(u0.adjoint() * u1), q, opts)
}

/// Inner radii of `W_q(A)` and `W_q(I_2 (x) A)`, which coincide.
pub fn check_tensor_identity(a: &CMatrix, q: f64, opts: &QRangeOptions) -> Result<TensorIdentityCheck> {
    let single = inner_radius(a, q, opts)?;
    let lifted = inner_radius(&linalg::kron(&linalg::identity(2), a), q, opts)?;
    Ok(TensorIdentityCheck { single, lifted, delta: (single - lifted).abs() })
}

/// Eigenvalue extremes of a positive definite `A` and an overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams {
    pub lambda0: f64,
    pub lambda1: f64,
    pub q: f64,
}

impl EllipseParams {
    pub fn new(lambda0: f64, lambda1: f64, q: f64) -> Result<Self> {
        if !(0.0 < lambda1 && lambda1 <= lambda0 && lambda0 <= 1.0) {
            return Err(Error::InvalidArgument(format!("need 0 < lambda1 <= lambda0 <= 1, got {lambda0}, {lambda1}")));
        }
        check_q(q)?;
        Ok(Self { lambda0, lambda1, q })
    }
}

/// Nearest point of the elliptical disk with foci `q lambda0`, `q lambda1`
/// and eccentricity `q` to the origin.
pub fn pd_inner_radius(p: EllipseParams) -> f64 {
    (0.5 * (p.q * (p.lambda0 + p.lambda1) - (p.lambda0 - p.lambda1))).max(0.0)
}

/// `(lambda0 - lambda1) / (lambda0 + lambda1)`, where the disk reaches 0.
pub fn pd_q_max(lambda0: f64, lambda1: f64) -> f64 {
    (lambda0 - lambda1) / (lambda0 + lambda1)
}

/// `1, q_1, q_2, ...` under `q_{k+1} = pd_inner_radius(q_k)`, ending at the
/// first zero or after `k_cap` steps.
pub fn pd_sequence(lambda0: f64, lambda1: f64, k_cap: usize) -> Result<Vec<f64>> {
    EllipseParams::new(lambda0, lambda1, 1.0)?;
    let mut values = vec![1.0];
    for _ in 0..k_cap {
        let next = pd_inner_radius(EllipseParams { lambda0, lambda1, q: *values.last().expect("nonempty") });
        values.push(next);
        if next <= 0.0 {
            break;
        }
    }
    Ok(values)
}

/// The recursion count and the closed form
/// `ceil((ln 2 + ln(1 - lambda1) - ln lambda1) / (ln 2 - ln(lambda0 + lambda1)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdNMin {
    /// First `k` with `q_k <= 0`; absent when `lambda0 = lambda1`.
    pub recursion_n: Option<usize>,
    pub closed_form_n: Option<usize>,
    /// `ceil(ln q_max / ln lambda1)` when `q_max > 0`.
    pub log_bound: Option<usize>,
}

/// Iteration limit for the recursion in [`pd_n_min`].
pub const PD_RECURSION_CAP: usize = 100_000;

pub fn pd_n_min(lambda0: f64, lambda1: f64) -> Result<PdNMin> {
    EllipseParams::new(lambda0, lambda1, 1.0)?;
    if lambda0 >= 1.0 {
        return Err(Error::InvalidArgument("need lambda0 < 1".into()));
    }
    let mut q = 1.0;
    let mut recursion_n = None;
    if lambda0 > lambda1 {
        for k in 1..=PD_RECURSION_CAP {
            q = 0.5 * ((lambda0 + lambda1) * q - (lambda0 - lambda1));
            if q <= 0.0 {
                recursion_n = Some(k);
                break;
            }
        }
    }
    let ratio = ((2.0f64).ln() + (1.0 - lambda1).ln() - lambda1.ln()) / ((2.0f64).ln() - (lambda0 + lambda1).ln());
    let closed_form_n = (ratio.is_finite() && ratio > 0.0).then(|| ratio.ceil() as usize);
    let qm = pd_q_max(lambda0, lambda1);
    let log_bound = (qm > 0.0).then(|| (qm.ln() / lambda1.ln() - 1e-12).ceil().max(1.0) as usize);
    Ok(PdNMin { recursion_n, closed_form_n, log_bound })
}
