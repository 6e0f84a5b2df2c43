//! Ronkin function, amoeba membership, unit-torus roots and phases.
//!
//! The Ronkin function `F(x, y)` is the average of `log |P|` over the torus
//! `|z| = e^x, |w| = e^y`. For each `w` on its circle the average over `z` is
//! given exactly by Jensen's formula in the roots of `z -> P(z, w)`, so only
//! a one-dimensional integral remains.

mod grid;

use num_complex::Complex64;
use serde::Serialize;

pub use grid::{
    amoeba_area, amoeba_grid, amoeba_grid_with, suggest_window, AreaEstimate, Component, ComponentKind, GridOptions,
    PhaseDiagram, RonkinGrid, Window,
};

use crate::error::{DimerError, Result};
use crate::newton::{newton_polygon, NewtonPolygon};
use crate::poly::poly_roots;
use crate::quad;
use crate::FloatPoly;

use std::f64::consts::PI;

/// Default absolute tolerance for Ronkin quadrature.
pub const RONKIN_TOLERANCE: f64 = 1e-11;

/// Coefficients of `P` grouped by the power of `z`.
#[derive(Clone, Debug)]
pub(crate) struct Slicer {
    jmin: i32,
    rows: Vec<Vec<(i32, f64)>>,
}

impl Slicer {
    pub(crate) fn new(p: &FloatPoly) -> Self {
        let Some(((jmin, jmax), _)) = p.exponent_bounds() else {
            return Self { jmin: 0, rows: Vec::new() };
        };
        let mut rows = vec![Vec::new(); (jmax - jmin + 1) as usize];
        for (&(j, k), &c) in p.terms() {
            rows[(j - jmin) as usize].push((k, c));
        }
        Self { jmin, rows }
    }

    /// Exponent offset, leading coefficient and nonzero roots of
    /// `z -> P(z, w)`: `P = a_top z^low prod (z - r)`.
    pub(crate) fn factor(&self, w: Complex64) -> Option<(i32, Complex64, Vec<Complex64>)> {
        let a: Vec<Complex64> =
            self.rows.iter().map(|row| row.iter().map(|&(k, c)| c * w.powi(k)).sum::<Complex64>()).collect();
        let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        let top = a.iter().rposition(|c| c.norm() > 1e-14 * scale)?;
        let lo = a.iter().position(|c| c.norm() != 0.0)?;
        let roots = poly_roots(&a[lo..=top]);
        Some((self.jmin + lo as i32, a[top], roots))
    }

    /// Average of `log |P(e^(x + i t), w)|` over `t`, by Jensen's formula.
    pub(crate) fn jensen(&self, x: f64, w: Complex64) -> f64 {
        match self.factor(w) {
            Some((low, lead, roots)) => {
                low as f64 * x + lead.norm().ln() + roots.iter().map(|r| x.max(r.norm().ln())).sum::<f64>()
            }
            None => f64::NEG_INFINITY,
        }
    }

    /// Zeros minus poles of `z -> P(z, w)` inside `|z| < e^x`.
    pub(crate) fn winding(&self, x: f64, w: Complex64) -> i32 {
        match self.factor(w) {
            Some((low, _, roots)) => low + roots.iter().filter(|r| r.norm().ln() < x).count() as i32,
            None => 0,
        }
    }

    /// Distance in log-modulus from the circle `|z| = e^x` to the nearest root.
    fn root_gap(&self, x: f64, w: Complex64) -> f64 {
        self.factor(w)
            .map(|(_, _, roots)| roots.iter().map(|r| (r.norm().ln() - x).abs()).fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::INFINITY)
    }
}

/// Angles `phi` in `(a, b)` where a root of `z -> P(z, e^(y + i phi))`
/// crosses `|z| = e^x`.
pub(crate) fn crossing_angles(s: &Slicer, x: f64, y: f64, a: f64, b: f64, samples: usize) -> Vec<f64> {
    let w_at = |phi: f64| Complex64::from_polar(y.exp(), phi);
    let count = |phi: f64| s.winding(x, w_at(phi));
    let mut out = Vec::new();
    let h = (b - a) / samples as f64;
    let mut prev_phi = a;
    let mut prev = count(a);
    let mut prev_gap = s.root_gap(x, w_at(a));
    for i in 1..=samples {
        let phi = a + h * i as f64;
        let c = count(phi);
        let gap = s.root_gap(x, w_at(phi));
        if c != prev {
            out.push(bisect_jump(&count, prev_phi, phi, prev));
        } else if prev_gap < 0.05 && gap < 0.05 {
            // A root may dip across the circle and back within one step.
            let sub = 16;
            let mut sp = prev_phi;
            let mut sc = prev;
            for k in 1..=sub {
                let q = prev_phi + (phi - prev_phi) * k as f64 / sub as f64;
                let qc = count(q);
                if qc != sc {
                    out.push(bisect_jump(&count, sp, q, sc));
                }
                sp = q;
                sc = qc;
            }
        }
        prev_phi = phi;
        prev = c;
        prev_gap = gap;
    }
    out
}

fn bisect_jump(count: &impl Fn(f64) -> i32, mut lo: f64, mut hi: f64, left: i32) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) == left {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RonkinValue {
    pub value: f64,
    pub error: f64,
}

pub fn ronkin(p: &FloatPoly, x: f64, y: f64) -> Result<f64> {
    ronkin_with_tolerance(p, x, y, RONKIN_TOLERANCE).map(|r| r.value)
}

/// Ronkin function with the quadrature error estimate. Uses the symmetry
/// `phi -> -phi` of real polynomials.
pub fn ronkin_with_tolerance(p: &FloatPoly, x: f64, y: f64, tolerance: f64) -> Result<RonkinValue> {
    if p.is_zero() {
        return Err(DimerError::InvalidArgument("Ronkin function of the zero polynomial".into()));
    }
    let s = Slicer::new(p);
    let breaks = crossing_angles(&s, x, y, 0.0, PI, 64);
    let ey = y.exp();
    let r = quad::integrate(|phi| s.jensen(x, Complex64::from_polar(ey, phi)), 0.0, PI, &breaks, tolerance * PI, 4000);
    if !r.converged || !r.value.is_finite() {
        return Err(DimerError::NonConvergence(format!(
            "Ronkin quadrature at ({x}, {y}) stopped with error {:.2e}",
            r.error / PI
        )));
    }
    Ok(RonkinValue { value: r.value / PI, error: r.error / PI })
}

/// Gradient of the Ronkin function from the argument principle: `F_x` is
/// the average winding number of `z -> P(z, w)` around `|z| = e^x`, and
/// symmetrically for `F_y`.
pub fn ronkin_gradient(p: &FloatPoly, x: f64, y: f64) -> (f64, f64) {
    let gx = average_winding(&Slicer::new(p), x, y);
    let gy = average_winding(&Slicer::new(&p.transposed()), y, x);
    (gx, gy)
}

fn average_winding(s: &Slicer, x: f64, y: f64) -> f64 {
    let mut pts = vec![0.0];
    pts.extend(crossing_angles(s, x, y, 0.0, PI, 256));
    pts.push(PI);
    pts.sort_by(f64::total_cmp);
    let ey = y.exp();
    let mut acc = 0.0;
    for seg in pts.windows(2) {
        if seg[1] > seg[0] {
            let mid = 0.5 * (seg[0] + seg[1]);
            acc += (seg[1] - seg[0]) * s.winding(x, Complex64::from_polar(ey, mid)) as f64;
        }
    }
    acc / PI
}

/// Result of the sign test for amoeba membership.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    /// Product of the four normalized values `P(±e^x, ±e^y) / S(x, y)`
    /// where `S` sums the absolute values of the terms.
    pub margin: f64,
    /// Signs of the four factors, in the order `(+,+), (-,+), (+,-), (-,-)`.
    pub signs: [i8; 4],
}

/// Membership by the sign of `prod P(±e^x, ±e^y)`; valid for polynomials
/// with real Harnack spectral curves.
pub fn amoeba_contains(p: &FloatPoly, x: f64, y: f64) -> Membership {
    let mut top = f64::NEG_INFINITY;
    for (&(j, k), _) in p.terms() {
        top = top.max(j as f64 * x + k as f64 * y);
    }
    let mut sums = [0.0f64; 4];
    let mut total = 0.0;
    for (&(j, k), &c) in p.terms() {
        let t = c * (j as f64 * x + k as f64 * y - top).exp();
        total += t.abs();
        let jo = j.rem_euclid(2) == 1;
        let ko = k.rem_euclid(2) == 1;
        sums[0] += t;
        sums[1] += if jo { -t } else { t };
        sums[2] += if ko { -t } else { t };
        sums[3] += if jo ^ ko { -t } else { t };
    }
    let mut margin = 1.0;
    let mut signs = [0i8; 4];
    for i in 0..4 {
        let f = sums[i] / total;
        margin *= f;
        signs[i] = if f > 0.0 {
            1
        } else if f < 0.0 {
            -1
        } else {
            0
        };
    }
    Membership { inside: margin <= 0.0, margin, signs }
}

/// A zero of `P(e^x z, e^y w)` on the unit torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TorusRoot {
    pub z: Complex64,
    pub w: Complex64,
    /// `∂/∂z` of `P(e^x z, e^y w)` at the root.
    pub alpha: Complex64,
    /// `∂/∂w` of `P(e^x z, e^y w)` at the root.
    pub beta: Complex64,
    pub multiplicity: usize,
    pub node: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusRoots {
    pub x: f64,
    pub y: f64,
    pub roots: Vec<TorusRoot>,
}

impl TorusRoots {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
    pub fn len(&self) -> usize {
        self.roots.len()
    }
    pub fn has_node(&self) -> bool {
        self.roots.iter().any(|r| r.node)
    }
}

/// All unit-torus roots of `P(e^x z, e^y w)`, located by scanning `w` on
/// the unit circle and bisecting where the number of `z`-roots inside the
/// unit disk jumps. Real nodes, where two roots touch without crossing, are
/// detected separately at `(±1, ±1)`.
pub fn torus_roots(p: &FloatPoly, x: f64, y: f64) -> TorusRoots {
    torus_roots_with(p, x, y, 512)
}

pub fn torus_roots_with(p: &FloatPoly, x: f64, y: f64, samples: usize) -> TorusRoots {
    let s = Slicer::new(p);
    let ex = x.exp();
    let ey = y.exp();
    let scale: f64 = p.terms().map(|(&(j, k), c)| c.abs() * (j as f64 * x + k as f64 * y).exp()).sum();
    let derivatives = |z: Complex64, w: Complex64| {
        let (dz, dw) = p.partials(z * ex, w * ey);
        (dz * ex, dw * ey)
    };
    let mut roots: Vec<TorusRoot> = Vec::new();
    // Offset the scan so it does not start on the real axis.
    let shift = 0.0123;
    let phis = crossing_angles(&s, x, y, shift, shift + 2.0 * PI, samples);
    for phi in phis {
        let w = Complex64::from_polar(1.0, phi);
        let Some((_, _, zs)) = s.factor(w * ey) else { continue };
        let Some(best) = zs.iter().min_by(|a, b| (a.norm().ln() - x).abs().total_cmp(&(b.norm().ln() - x).abs())) else {
            continue;
        };
        let z = best / best.norm();
        let (alpha, beta) = derivatives(z, w);
        roots.push(TorusRoot { z, w, alpha, beta, multiplicity: 1, node: false });
    }
    for (sz, sw) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        let z = Complex64::new(sz, 0.0);
        let w = Complex64::new(sw, 0.0);
        let v = p.eval_complex(z * ex, w * ey).norm() / scale;
        let (a, b) = derivatives(z, w);
        let grad = (a.norm() + b.norm()) / scale;
        if v < 1e-9 && grad < 1e-6 {
            roots.retain(|r| (r.z - z).norm() > 1e-4 || (r.w - w).norm() > 1e-4);
            roots.push(TorusRoot { z, w, alpha: a, beta: b, multiplicity: 2, node: true });
        }
    }
    TorusRoots { x, y, roots }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Frozen,
    Liquid,
    Gaseous,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Frozen => "frozen",
            Phase::Liquid => "liquid",
            Phase::Gaseous => "gaseous",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseReport {
    pub phase: Phase,
    /// Gradient of the Ronkin function.
    pub slope: (f64, f64),
    /// Nearest lattice slope for frozen and gaseous points.
    pub lattice_slope: Option<(i32, i32)>,
    pub boundary: bool,
    pub margin: f64,
}

/// Phase of the Gibbs measure with magnetic field `(bx, by)`: liquid inside
/// the amoeba, gaseous in bounded complement components (interior lattice
/// slopes), frozen in unbounded ones.
pub fn phase_of(p: &FloatPoly, bx: f64, by: f64) -> Result<PhaseReport> {
    phase_with_polygon(p, &newton_polygon(p), bx, by)
}

pub fn phase_with_polygon(p: &FloatPoly, newton: &NewtonPolygon, bx: f64, by: f64) -> Result<PhaseReport> {
    let m = amoeba_contains(p, bx, by);
    let slope = ronkin_gradient(p, bx, by);
    let boundary = m.margin.abs() < 1e-9;
    if m.inside {
        return Ok(PhaseReport { phase: Phase::Liquid, slope, lattice_slope: None, boundary, margin: m.margin });
    }
    let lattice = (slope.0.round() as i32, slope.1.round() as i32);
    let residual = (slope.0 - lattice.0 as f64).abs().max((slope.1 - lattice.1 as f64).abs());
    if residual > 1e-3 && !boundary {
        return Err(DimerError::Indeterminate(format!(
            "slope ({:.4}, {:.4}) outside the amoeba is not a lattice point",
            slope.0, slope.1
        )));
    }
    let phase = if newton.is_interior_lattice_point(lattice) { Phase::Gaseous } else { Phase::Frozen };
    Ok(PhaseReport { phase, slope, lattice_slope: Some(lattice), boundary: boundary || residual > 1e-3, margin: m.margin })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq_oct() -> FloatPoly {
        FloatPoly::from_terms([((0, 0), 5.0), ((1, 0), -1.0), ((-1, 0), -1.0), ((0, 1), -1.0), ((0, -1), -1.0)])
    }

    #[test]
    fn monomial_ronkin_is_linear() {
        let p = FloatPoly::monomial(1, 0, 1.0);
        assert!((ronkin(&p, 0.7, -2.0).unwrap() - 0.7).abs() < 1e-13);
        let c = FloatPoly::monomial(0, 0, 3.0);
        assert!((ronkin(&c, 1.0, 1.0).unwrap() - 3f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn ronkin_linear_in_tentacle() {
        let p = sq_oct();
        let f = ronkin(&p, 12.0, 0.0).unwrap();
        assert!((f - 12.0).abs() < 1e-6, "{f}");
    }

    #[test]
    fn gradient_counts_match_finite_differences() {
        let p = sq_oct();
        let (x, y) = (1.2, 0.3);
        let h = 1e-4;
        let fx = (ronkin(&p, x + h, y).unwrap() - ronkin(&p, x - h, y).unwrap()) / (2.0 * h);
        let fy = (ronkin(&p, x, y + h).unwrap() - ronkin(&p, x, y - h).unwrap()) / (2.0 * h);
        let (gx, gy) = ronkin_gradient(&p, x, y);
        assert!((fx - gx).abs() < 1e-6 && (fy - gy).abs() < 1e-6, "{fx} {gx} {fy} {gy}");
    }

    #[test]
    fn membership_examples() {
        let p = sq_oct();
        let origin = amoeba_contains(&p, 0.0, 0.0);
        assert!(!origin.inside && origin.margin > 0.0);
        // z + 1/z sweeps [3, 7] along the real slice inside the amoeba.
        assert!(amoeba_contains(&p, 5f64.ln(), 0.0).inside);
        let far = amoeba_contains(&p, 10f64.ln(), 0.0);
        assert!(!far.inside && far.margin > 0.0);
        let node = FloatPoly::from_terms([((0, 0), 4.0), ((1, 0), -1.0), ((-1, 0), -1.0), ((0, 1), -1.0), ((0, -1), -1.0)]);
        assert!(amoeba_contains(&node, 0.0, 0.0).margin.abs() < 1e-15);
    }

    #[test]
    fn node_curve_has_single_node() {
        let node = FloatPoly::from_terms([((0, 0), 4.0), ((1, 0), -1.0), ((-1, 0), -1.0), ((0, 1), -1.0), ((0, -1), -1.0)]);
        let r = torus_roots(&node, 0.0, 0.0);
        assert_eq!(r.len(), 1, "{:?}", r.roots);
        assert!(r.roots[0].node);
        assert!((r.roots[0].z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
