//! Local statistics of the ergodic Gibbs measures: the inverse Kasteleyn
//! kernel as a torus Fourier integral, edge probabilities, covariances and
//! their finite-torus counterparts.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::amoeba::{amoeba_contains, crossing_angles, Slicer};
use crate::charpoly::{characteristic_polynomial, permutation_sign, MagneticKasteleyn};
use crate::error::{DimerError, Result};
use crate::lattice::{FundamentalDomain, TorusGraph};
use crate::linalg::DenseMatrix;
use crate::quad;
use crate::scalar::Scalar;
use crate::FloatPoly;

/// An edge of the infinite periodic graph: a base edge of the fundamental
/// domain placed with its white endpoint in `cell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeRef {
    pub edge: usize,
    pub cell: (i32, i32),
}

impl EdgeRef {
    pub fn new(edge: usize, cell: (i32, i32)) -> Self {
        Self { edge, cell }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub error: f64,
}

/// Roots closer than this to the integration circle (in log-modulus) have
/// their pole subtracted analytically before the trapezoidal rule.
const POLE_BAND: f64 = 0.3;
/// Largest trapezoidal grid for the inner integral.
const MAX_INNER: usize = 4096;
/// Rotation of the trapezoidal nodes away from the real axis, where real
/// roots of symmetric curves tend to sit.
const NODE_PHASE: f64 = 0.0123;

/// `K⁻¹(b + offset, w)` for the Gibbs measure with magnetic field
/// `(bx, by)`, cached per offset as a full black-by-white block.
///
/// The torus integral is split into an inner integral over `z`, done by the
/// trapezoidal rule after subtracting the simple poles near `|z| = e^bx`
/// and adding back their residues, and an outer adaptive integral over
/// `arg w` with breakpoints where a pole crosses the circle. At a real node
/// of the spectral curve on the torus the integrand is discontinuous and
/// the reported error stays large.
pub struct InverseKernel<'a> {
    domain: &'a FundamentalDomain,
    kast: MagneticKasteleyn<'a>,
    p: FloatPoly,
    slicer: Slicer,
    bx: f64,
    by: f64,
    /// Log-radii of the integration torus; equal to the field unless moved
    /// inside a complement component of the amoeba.
    contour: (f64, f64),
    tolerance: f64,
    cache: RwLock<HashMap<(i32, i32), Arc<Vec<KernelValue>>>>,
}

impl<'a> InverseKernel<'a> {
    pub fn new(domain: &'a FundamentalDomain, bx: f64, by: f64) -> Result<Self> {
        Self::with_tolerance(domain, bx, by, 1e-11)
    }

    pub fn with_tolerance(domain: &'a FundamentalDomain, bx: f64, by: f64, tolerance: f64) -> Result<Self> {
        let kast = MagneticKasteleyn::new(domain)?;
        let p = characteristic_polynomial(domain)?;
        let slicer = Slicer::new(&p);
        Ok(Self { domain, kast, p, slicer, bx, by, contour: (bx, by), tolerance, cache: RwLock::new(HashMap::new()) })
    }

    /// Integrates on the torus of log-radii `(cx, cy)` instead of the field
    /// point. The two must lie in the same complement component of the
    /// amoeba, so no pole is crossed; the entry at offset `(dx, dy)` then
    /// carries the exact factor `e^((cx - bx) dy - (cy - by) dx)`, which in a
    /// gaseous phase turns exponential decay into relative accuracy.
    pub fn with_contour(mut self, cx: f64, cy: f64) -> Result<Self> {
        let from = amoeba_contains(&self.p, self.bx, self.by);
        let steps = 256;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let m = amoeba_contains(&self.p, self.bx + t * (cx - self.bx), self.by + t * (cy - self.by));
            if m.inside || m.signs != from.signs {
                return Err(DimerError::InvalidArgument(format!(
                    "contour ({cx}, {cy}) is not joined to the field ({}, {}) outside the amoeba",
                    self.bx, self.by
                )));
            }
        }
        self.contour = (cx, cy);
        self.cache.write().expect("cache lock").clear();
        Ok(self)
    }

    pub fn domain(&self) -> &FundamentalDomain {
        self.domain
    }

    pub fn field(&self) -> (f64, f64) {
        (self.bx, self.by)
    }

    pub fn polynomial(&self) -> &FloatPoly {
        &self.p
    }

    /// Signed edge weight including the magnetic factor `e^(bx dy - by dx)`.
    pub fn edge_weight(&self, e: usize) -> f64 {
        let (dx, dy) = self.domain.edges[e].offset;
        self.kast.edge_entry::<f64>(e).expect("float weights always exist")
            * (self.bx * dy as f64 - self.by * dx as f64).exp()
    }

    /// `K⁻¹(b + offset, w)` where `offset` is the cell of the black vertex
    /// relative to the white one.
    pub fn entry(&self, b: usize, w: usize, offset: (i32, i32)) -> Result<KernelValue> {
        let n = self.domain.size();
        Ok(self.block(offset)?[b * n + w])
    }

    /// All entries `K⁻¹(b + offset, w)`, row-major in `(b, w)`.
    pub fn block(&self, offset: (i32, i32)) -> Result<Arc<Vec<KernelValue>>> {
        if let Some(v) = self.cache.read().expect("cache lock").get(&offset) {
            return Ok(v.clone());
        }
        let block = Arc::new(self.compute_block(offset)?);
        self.cache.write().expect("cache lock").insert(offset, block.clone());
        Ok(block)
    }

    fn compute_block(&self, offset: (i32, i32)) -> Result<Vec<KernelValue>> {
        let (cx, cy) = self.contour;
        let ey = cy.exp();
        let breaks = crossing_angles(&self.slicer, cx, cy, 0.0, PI, 64);
        let mut inner_errors: Vec<(f64, f64)> = Vec::new();
        // The kernel is real, so the integrand over arg w is conjugate
        // symmetric and [0, π] suffices. Real nodes of the curve can only
        // sit at arg w ∈ {0, π}, where the integrand behaves like a square
        // root; β = u² near 0 and β = π - (2s - u)² near π make it smooth.
        let s = (PI / 2.0).sqrt();
        let to_beta = |u: f64| if u <= s { (u * u, 2.0 * u) } else { (PI - (2.0 * s - u).powi(2), 2.0 * (2.0 * s - u)) };
        let mut ubreaks: Vec<f64> =
            breaks.iter().map(|&b| if b <= PI / 2.0 { b.sqrt() } else { 2.0 * s - (PI - b).sqrt() }).collect();
        ubreaks.push(s);
        let r = quad::integrate_vec(
            |u| {
                let (beta, jac) = to_beta(u);
                let wv = Complex64::from_polar(ey, beta);
                let (vals, err) = self.inner(offset.1, wv);
                inner_errors.push((u, err * jac));
                let phase = Complex64::from_polar(jac, -beta * offset.0 as f64);
                vals.into_iter().map(|x| (x * phase).re).collect()
            },
            0.0,
            2.0 * s,
            &ubreaks,
            self.tolerance * PI,
            2000,
        );
        // Trapezoidal estimate of the integrated inner error.
        inner_errors.sort_by(|a, b| a.0.total_cmp(&b.0));
        let inner_error = inner_errors.windows(2).map(|p| 0.5 * (p[0].1 + p[1].1) * (p[1].0 - p[0].0)).sum::<f64>() / PI;
        if !r.converged {
            return Err(DimerError::NonConvergence(format!(
                "inverse kernel quadrature stopped with error {:.2e}",
                r.error / PI + inner_error
            )));
        }
        let shift = ((cx - self.bx) * offset.1 as f64 - (cy - self.by) * offset.0 as f64).exp();
        let error = shift * (r.error / PI + inner_error);
        Ok(r.values.into_iter().map(|v| KernelValue { value: shift * v / PI, error }).collect())
    }

    /// Inner integral over `|z| = e^cx` of `K⁻¹(z, w) (z e^-cx)^dy`, row-major
    /// in `(b, w)`, with its error estimate.
    fn inner(&self, dy: i32, wv: Complex64) -> (Vec<Complex64>, f64) {
        let n = self.domain.size();
        let cx = self.contour.0;
        let ex = cx.exp();
        let (a, bexp) = self.kast.reference_exponent();
        let mut poles: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
        if let Some((_, _, roots)) = self.slicer.factor(wv) {
            for r in roots {
                if r.norm() > 0.0 && (r.norm().ln() - cx).abs() < POLE_BAND {
                    let k = self.kast.eval(&r, &wv).expect("nonzero arguments");
                    let (pz, _) = self.p.partials(r, wv);
                    // d/dz det K = z^a w^b P_z at a zero of P; the subtracted
                    // term c z / (z - r) has residue c r.
                    let ddet = r.powi(a) * wv.powi(bexp) * pz;
                    let scale = (r / ex).powi(dy) / (ddet * r);
                    let residues: Vec<Complex64> =
                        (0..n * n).map(|i| cofactor(&k, i % n, i / n) * scale).collect();
                    poles.push((r, residues));
                }
            }
        }
        let sample = |theta: f64, acc: &mut [Complex64]| {
            let z = Complex64::from_polar(ex, theta);
            let k = self.kast.eval(&z, &wv).expect("nonzero arguments");
            let inv = k.inverse();
            let factor = (z / ex).powi(dy);
            for i in 0..n * n {
                let mut v = inv.as_ref().map_or(Complex64::new(f64::NAN, 0.0), |m| m[(i / n, i % n)]) * factor;
                for (r, res) in &poles {
                    v -= res[i] * z / (z - r);
                }
                acc[i] += v;
            }
        };
        // Nested grids: doubling m only adds the midpoints.
        let mut m = 32;
        let mut sum = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..m {
            sample(NODE_PHASE + 2.0 * PI * j as f64 / m as f64, &mut sum);
        }
        let mut prev: Vec<Complex64> = sum.iter().map(|v| v / m as f64).collect();
        let mut err = f64::INFINITY;
        while m < MAX_INNER {
            for j in 0..m {
                sample(NODE_PHASE + 2.0 * PI * (j as f64 + 0.5) / m as f64, &mut sum);
            }
            m *= 2;
            let next: Vec<Complex64> = sum.iter().map(|v| v / m as f64).collect();
            err = prev.iter().zip(&next).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prev = next;
            if err < 0.1 * self.tolerance {
                break;
            }
        }
        if err.is_nan() {
            err = f64::INFINITY;
        }
        for (r, res) in &poles {
            if r.norm() < ex {
                for (v, c) in prev.iter_mut().zip(res) {
                    *v += c;
                }
            }
        }
        (prev, err)
    }
}

/// `adj(K)[b, w] = (-1)^(w + b) det K` with row `w` and column `b` removed.
fn cofactor(k: &DenseMatrix<Complex64>, w: usize, b: usize) -> Complex64 {
    let n = k.size();
    if n == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let rows: Vec<usize> = (0..n).filter(|&i| i != w).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| j != b).collect();
    let d = k.select(&rows, &cols).det();
    if (w + b) % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Probability that all `edges` are present:
/// `prod K(w_i, b_i) · det [K⁻¹(b_i, w_j)]`.
pub fn edge_probability(kernel: &InverseKernel<'_>, edges: &[EdgeRef]) -> Result<KernelValue> {
    for (i, a) in edges.iter().enumerate() {
        if edges[..i].contains(a) {
            return Err(DimerError::InvalidArgument(format!("edge {a:?} is listed twice")));
        }
    }
    let d = kernel.domain;
    let k = edges.len();
    let mut m = DenseMatrix::<f64>::zeros(k);
    let mut err = 0.0;
    let mut weight = 1.0;
    for (i, ei) in edges.iter().enumerate() {
        let edge = &d.edges[ei.edge];
        let bcell = (ei.cell.0 + edge.offset.0, ei.cell.1 + edge.offset.1);
        weight *= kernel.edge_weight(ei.edge);
        for (j, ej) in edges.iter().enumerate() {
            let wj = d.edges[ej.edge].white;
            let v = kernel.entry(edge.black, wj, (bcell.0 - ej.cell.0, bcell.1 - ej.cell.1))?;
            m[(i, j)] = v.value;
            err += v.error;
        }
    }
    let det = m.det();
    Ok(KernelValue { value: weight * det, error: weight.abs() * err * (1.0 + det.abs()) })
}

/// `Cov(e1, e2) = -K(e1) K(e2) K⁻¹(b2, w1) K⁻¹(b1, w2)`.
pub fn edge_covariance(kernel: &InverseKernel<'_>, e1: EdgeRef, e2: EdgeRef) -> Result<f64> {
    edge_covariance_split(kernel, kernel, e1, e2)
}

/// [`edge_covariance`] with `K⁻¹(b2, w1)` taken from `forward` and
/// `K⁻¹(b1, w2)` from `backward`, which may integrate on different contours
/// of the same Gibbs measure.
pub fn edge_covariance_split(
    forward: &InverseKernel<'_>,
    backward: &InverseKernel<'_>,
    e1: EdgeRef,
    e2: EdgeRef,
) -> Result<f64> {
    if e1 == e2 {
        return Err(DimerError::InvalidArgument("covariance needs two distinct edges".into()));
    }
    if forward.field() != backward.field() {
        return Err(DimerError::InvalidArgument("kernels belong to different fields".into()));
    }
    let d = forward.domain;
    let (a, b) = (&d.edges[e1.edge], &d.edges[e2.edge]);
    let b1 = (e1.cell.0 + a.offset.0, e1.cell.1 + a.offset.1);
    let b2 = (e2.cell.0 + b.offset.0, e2.cell.1 + b.offset.1);
    let k21 = forward.entry(b.black, a.white, (b2.0 - e1.cell.0, b2.1 - e1.cell.1))?.value;
    let k12 = backward.entry(a.black, b.white, (b1.0 - e2.cell.0, b1.1 - e2.cell.1))?.value;
    Ok(-forward.edge_weight(e1.edge) * forward.edge_weight(e2.edge) * k21 * k12)
}

/// Least-squares line through `(u, v)` pairs with its coefficient of
/// determination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mu = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = points.iter().map(|p| p.1).sum::<f64>() / n;
    let suu: f64 = points.iter().map(|p| (p.0 - mu).powi(2)).sum();
    let suv: f64 = points.iter().map(|p| (p.0 - mu) * (p.1 - mv)).sum();
    let svv: f64 = points.iter().map(|p| (p.1 - mv).powi(2)).sum();
    if suu == 0.0 {
        return None;
    }
    let slope = suv / suu;
    let r_squared = if svv == 0.0 { 1.0 } else { suv * suv / (suu * svv) };
    Some(LineFit { slope, intercept: mv - slope * mu, r_squared })
}

/// Fit of `log |c(r)|` against `log r`; the slope is the power-law exponent.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Option<LineFit> {
    let pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.1 != 0.0).map(|&(r, c)| (r.ln(), c.abs().ln())).collect();
    fit_line(&pts)
}

/// Fit of `log |c(r)|` against `r`; minus the slope is the decay rate.
pub fn fit_exponential(samples: &[(f64, f64)]) -> Option<LineFit> {
    let pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.1 != 0.0).map(|&(r, c)| (r, c.abs().ln())).collect();
    fit_line(&pts)
}

/// The four signed twist contributions `c_θτ P_n^(θτ) Pr_θτ(edges) / 2` whose
/// sum is `Z · Pr(edges)`, in the order `(1,1), (1,-1), (-1,1), (-1,-1)`,
/// together with `Z`. Minors are used in place of inverses, so singular
/// twisted matrices are handled.
pub fn torus_probability_terms<T: Scalar>(
    kast: &MagneticKasteleyn<'_>,
    torus: &TorusGraph,
    edges: &[usize],
) -> Result<([T; 4], T)> {
    let mut whites: Vec<usize> = Vec::with_capacity(edges.len());
    let mut blacks: Vec<usize> = Vec::with_capacity(edges.len());
    for (i, &e) in edges.iter().enumerate() {
        if edges[..i].contains(&e) {
            return Err(DimerError::InvalidArgument(format!("edge {e} is listed twice")));
        }
        let inst = torus.edge(e);
        whites.push(inst.white);
        blacks.push(inst.black);
    }
    let n = torus.num_whites();
    let conflict = (1..whites.len()).any(|i| whites[..i].contains(&whites[i]) || blacks[..i].contains(&blacks[i]));
    let one = T::one();
    let points = [(one.clone(), one.clone()), (one.clone(), -one.clone()), (-one.clone(), one.clone()), (-one.clone(), -one.clone())];
    let coeffs = [-1i64, 1, 1, 1];
    let mut terms: [T; 4] = [T::zero(), T::zero(), T::zero(), T::zero()];
    let mut z = T::zero();
    for (idx, (zz, ww)) in points.iter().enumerate() {
        let k = kast.torus_matrix::<T>(torus, zz, ww)?;
        let norm = kast.torus_normalization::<T>(torus, zz, ww);
        let c = T::from_i64(coeffs[idx]);
        z = z + c.clone() * norm.clone() * k.det();
        if conflict {
            continue;
        }
        let mut weight = one.clone();
        for &e in edges {
            weight = weight * kast.torus_edge_entry::<T>(torus, e, zz, ww)?;
        }
        // Jacobi: det K⁻¹[B, W] · det K = ± det K[W^c, B^c].
        let mut ws = whites.clone();
        let mut bs = blacks.clone();
        let sw = sort_sign(&mut ws);
        let sb = sort_sign(&mut bs);
        let parity = (ws.iter().sum::<usize>() + bs.iter().sum::<usize>()) % 2;
        let rows: Vec<usize> = (0..n).filter(|i| !ws.contains(i)).collect();
        let cols: Vec<usize> = (0..n).filter(|j| !bs.contains(j)).collect();
        let minor = if rows.is_empty() { one.clone() } else { k.select(&rows, &cols).det() };
        let sign = sw * sb * if parity == 1 { -1 } else { 1 };
        let value = c * norm * weight * minor;
        terms[idx] = if sign < 0 { -value } else { value };
    }
    let half = T::from_i64(2);
    let z = z / half.clone();
    let terms = terms.map(|t| t / half.clone());
    Ok((terms, z))
}

fn sort_sign(v: &mut [usize]) -> i32 {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by_key(|&i| v[i]);
    let s = permutation_sign(&idx);
    v.sort();
    s
}

/// Probability of a set of torus edges (instance indices) under the
/// uniform-weighted Boltzmann measure on `G_n`, from the four twisted
/// Kasteleyn matrices. Exact for rational scalars.
pub fn torus_edge_probability<T: Scalar>(kast: &MagneticKasteleyn<'_>, torus: &TorusGraph, edges: &[usize]) -> Result<T> {
    let (terms, z) = torus_probability_terms::<T>(kast, torus, edges)?;
    if z.is_zero() {
        return Err(DimerError::Singular("torus partition function vanishes".into()));
    }
    let total = terms.into_iter().fold(T::zero(), |a, b| a + b);
    Ok(total / z)
}
