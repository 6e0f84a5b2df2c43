//! Surface tension as the Legendre dual of the Ronkin function, slopes and
//! the Monge–Ampère identities.

use rayon::prelude::*;
use serde::Serialize;

use crate::amoeba::{amoeba_contains, ronkin, ronkin_gradient, torus_roots, Phase, RonkinGrid};
use crate::error::{DimerError, Result};
use crate::newton::{newton_polygon, NewtonPolygon};
use crate::FloatPoly;

use std::f64::consts::PI;

/// Value of the surface tension with the maximizer of `s x + t y - F(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SigmaValue {
    pub value: f64,
    pub argmax: (f64, f64),
    /// False when the ascent stopped on the window border or without
    /// reaching the stationarity tolerance; `value` is then a lower bound.
    pub converged: bool,
}

/// Evaluates `σ(s, t) = sup (s x + t y - F(x, y))` by a grid search over a
/// Ronkin grid followed by Newton ascent on the exact Ronkin function.
pub struct TensionSolver<'a> {
    p: &'a FloatPoly,
    newton: NewtonPolygon,
    grid: &'a RonkinGrid,
}

const JACOBIAN_STEP: f64 = 1e-5;

impl<'a> TensionSolver<'a> {
    pub fn new(p: &'a FloatPoly, grid: &'a RonkinGrid) -> Self {
        Self { p, newton: newton_polygon(p), grid }
    }

    pub fn polygon(&self) -> &NewtonPolygon {
        &self.newton
    }

    pub fn grid(&self) -> &RonkinGrid {
        self.grid
    }

    fn objective(&self, s: f64, t: f64, x: f64, y: f64) -> Result<f64> {
        Ok(s * x + t * y - ronkin(self.p, x, y)?)
    }

    /// Jacobian of the Ronkin gradient, which is the Hessian of `F`.
    pub fn hessian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let h = JACOBIAN_STEP;
        let (ax, ay) = ronkin_gradient(self.p, x + h, y);
        let (bx, by) = ronkin_gradient(self.p, x - h, y);
        let (cx, cy) = ronkin_gradient(self.p, x, y + h);
        let (dx, dy) = ronkin_gradient(self.p, x, y - h);
        let fxy = 0.5 * ((cx - dx) + (ay - by)) / (2.0 * h);
        [[(ax - bx) / (2.0 * h), fxy], [fxy, (cy - dy) / (2.0 * h)]]
    }

    pub fn sigma(&self, s: f64, t: f64) -> Result<SigmaValue> {
        if !self.newton.contains(s, t, 1e-12) {
            return Ok(SigmaValue { value: f64::INFINITY, argmax: (f64::NAN, f64::NAN), converged: true });
        }
        let g = self.grid;
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                let v = s * g.xs[ix] + t * g.ys[iy] - g.at(ix, iy);
                if v > best.0 {
                    best = (v, ix, iy);
                }
            }
        }
        let (mut x, mut y) = (g.xs[best.1], g.ys[best.2]);
        let mut value = best.0;
        let on_border = |ix: usize, iy: usize| ix == 0 || iy == 0 || ix + 1 == g.nx() || iy + 1 == g.ny();
        let mut converged = false;
        for _ in 0..40 {
            let (gx, gy) = ronkin_gradient(self.p, x, y);
            let (rx, ry) = (s - gx, t - gy);
            if rx.abs().max(ry.abs()) < 1e-11 {
                converged = true;
                break;
            }
            let h = self.hessian(x, y);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det.abs() < 1e-12 {
                // Flat direction: a complement component with a different
                // slope, or a facet already attaining the supremum.
                break;
            }
            let dx = (h[1][1] * rx - h[0][1] * ry) / det;
            let dy = (h[0][0] * ry - h[1][0] * rx) / det;
            let mut lambda = 1.0;
            let mut moved = false;
            while lambda > 1e-6 {
                let (nx, ny) = (x + lambda * dx, y + lambda * dy);
                let v = self.objective(s, t, nx, ny)?;
                if v >= value - 1e-14 {
                    x = nx;
                    y = ny;
                    value = v.max(value);
                    moved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if !converged {
            let (gx, gy) = ronkin_gradient(self.p, x, y);
            converged = (s - gx).abs().max((t - gy).abs()) < 1e-9 && !on_border(best.1, best.2);
            if !converged && (s - gx).abs().max((t - gy).abs()) < 1e-6 {
                // Facet: the objective is constant on the component.
                converged = !on_border(best.1, best.2);
            }
        }
        Ok(SigmaValue { value, argmax: (x, y), converged })
    }
}

/// σ sampled on a grid over the bounding box of the Newton polygon;
/// `+∞` outside the polygon.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceTensionGrid {
    pub ss: Vec<f64>,
    pub ts: Vec<f64>,
    /// Row-major values, `values[it * ss.len() + is]`.
    pub values: Vec<f64>,
    pub argmax: Vec<(f64, f64)>,
    /// Interior lattice points where σ has a conical singularity.
    pub cusps: Vec<(i32, i32)>,
}

impl SurfaceTensionGrid {
    pub fn compute(solver: &TensionSolver<'_>, ns: usize, nt: usize) -> Result<Self> {
        let v = &solver.polygon().vertices;
        let (smin, smax) = (v.iter().map(|p| p.0).min().unwrap_or(0) as f64, v.iter().map(|p| p.0).max().unwrap_or(0) as f64);
        let (tmin, tmax) = (v.iter().map(|p| p.1).min().unwrap_or(0) as f64, v.iter().map(|p| p.1).max().unwrap_or(0) as f64);
        let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if n < 2 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
        };
        let ss = axis(smin, smax, ns);
        let ts = axis(tmin, tmax, nt);
        let cells: Vec<Result<SigmaValue>> =
            (0..ss.len() * ts.len()).into_par_iter().map(|i| solver.sigma(ss[i % ss.len()], ts[i / ss.len()])).collect();
        let mut values = Vec::with_capacity(cells.len());
        let mut argmax = Vec::with_capacity(cells.len());
        for c in cells {
            let c = c?;
            values.push(c.value);
            argmax.push(c.argmax);
        }
        let mut cusps = Vec::new();
        for &lp in &solver.polygon().interior {
            if cusp_gap(solver, lp, 1e-3)? > CUSP_TOLERANCE {
                cusps.push(lp);
            }
        }
        Ok(Self { ss, ts, values, argmax, cusps })
    }

    /// `F**(x, y) = sup (s x + t y - σ(s, t))`: the supremum over the grid,
    /// refined at the slope where the ascent condition `∇σ(s, t) = (x, y)`
    /// holds, which is `∇F(x, y)`.
    pub fn double_conjugate(&self, solver: &TensionSolver<'_>, x: f64, y: f64) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for (i, &v) in self.values.iter().enumerate() {
            if v.is_finite() {
                best = best.max(self.ss[i % self.ss.len()] * x + self.ts[i / self.ss.len()] * y - v);
            }
        }
        let (s, t) = ronkin_gradient(solver.p, x, y);
        let sigma = solver.sigma(s, t)?;
        if sigma.value.is_finite() {
            best = best.max(s * x + t * y - sigma.value);
        }
        Ok(best)
    }
}

/// One-sided derivative gaps above this mark a cusp of σ.
pub const CUSP_TOLERANCE: f64 = 0.05;

/// Largest jump between one-sided derivatives of σ along the axes at a
/// lattice point, with difference step `h`.
pub fn cusp_gap(solver: &TensionSolver<'_>, point: (i32, i32), h: f64) -> Result<f64> {
    let (s, t) = (point.0 as f64, point.1 as f64);
    let c = solver.sigma(s, t)?.value;
    let mut gap: f64 = 0.0;
    for (ds, dt) in [(h, 0.0), (0.0, h)] {
        let plus = solver.sigma(s + ds, t + dt)?.value;
        let minus = solver.sigma(s - ds, t - dt)?.value;
        if plus.is_finite() && minus.is_finite() {
            gap = gap.max((plus - c) / h - (c - minus) / h);
        }
    }
    Ok(gap)
}

/// Hessian of σ by centered differences with step `h`.
pub fn sigma_hessian(solver: &TensionSolver<'_>, s: f64, t: f64, h: f64) -> Result<[[f64; 2]; 2]> {
    let f = |a: f64, b: f64| -> Result<f64> {
        let v = solver.sigma(s + a * h, t + b * h)?;
        if !v.converged || !v.value.is_finite() {
            return Err(DimerError::NonConvergence(format!("σ ascent failed near ({s}, {t})")));
        }
        Ok(v.value)
    };
    let c = f(0.0, 0.0)?;
    let sxx = (f(1.0, 0.0)? - 2.0 * c + f(-1.0, 0.0)?) / (h * h);
    let stt = (f(0.0, 1.0)? - 2.0 * c + f(0.0, -1.0)?) / (h * h);
    let sxt = (f(1.0, 1.0)? - f(1.0, -1.0)? - f(-1.0, 1.0)? + f(-1.0, -1.0)?) / (4.0 * h * h);
    Ok([[sxx, sxt], [sxt, stt]])
}

/// `det Hess F - 1/π²` at a grid node, using centered differences with a
/// step of two grid cells. The stencil must stay at least three cells away
/// from the amoeba boundary.
pub fn monge_ampere_residual(p: &FloatPoly, grid: &RonkinGrid, ix: usize, iy: usize) -> Result<f64> {
    let reach = 3;
    if ix < reach || iy < reach || ix + reach >= grid.nx() || iy + reach >= grid.ny() {
        return Err(DimerError::InvalidArgument("Monge–Ampère stencil leaves the grid".into()));
    }
    for jy in iy - reach..=iy + reach {
        for jx in ix - reach..=ix + reach {
            if !amoeba_contains(p, grid.xs[jx], grid.ys[jy]).inside {
                return Err(DimerError::InvalidArgument(format!(
                    "Monge–Ampère stencil at ({}, {}) touches the amoeba boundary",
                    grid.xs[ix], grid.ys[iy]
                )));
            }
        }
    }
    let h = grid.hessian(ix, iy, 2).expect("stencil checked above");
    Ok(h[0][0] * h[1][1] - h[0][1] * h[1][0] - 1.0 / (PI * PI))
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopeReport {
    pub phase: Phase,
    /// Centered finite-difference gradient of the Ronkin function.
    pub slope: (f64, f64),
    /// `(arg w0, -arg z0) / π` from a unit-torus root, in the liquid phase.
    pub argslope: Option<(f64, f64)>,
    /// Distance from `slope` to `±argslope + ℤ²`.
    pub agreement: Option<f64>,
    pub lattice_slope: Option<(i32, i32)>,
}

fn distance_mod_integers(a: (f64, f64), b: (f64, f64)) -> f64 {
    let d = |u: f64| (u - u.round()).abs();
    d(a.0 - b.0).max(d(a.1 - b.1))
}

/// Slope of the Gibbs measure with magnetic field `(bx, by)`: the gradient
/// of the Ronkin function by centered differences, cross-checked in the
/// liquid phase against the arguments of the unit-torus roots.
pub fn slope_at(p: &FloatPoly, bx: f64, by: f64) -> Result<SlopeReport> {
    let m = amoeba_contains(p, bx, by);
    if m.margin.abs() < 1e-9 {
        return Err(DimerError::Indeterminate(format!("({bx}, {by}) lies on the amoeba boundary")));
    }
    let h = 1e-4;
    let fx = (ronkin(p, bx + h, by)? - ronkin(p, bx - h, by)?) / (2.0 * h);
    let fy = (ronkin(p, bx, by + h)? - ronkin(p, bx, by - h)?) / (2.0 * h);
    let slope = (fx, fy);
    if !m.inside {
        let lattice = (fx.round() as i32, fy.round() as i32);
        let phase = if newton_polygon(p).is_interior_lattice_point(lattice) { Phase::Gaseous } else { Phase::Frozen };
        return Ok(SlopeReport { phase, slope, argslope: None, agreement: None, lattice_slope: Some(lattice) });
    }
    let roots = torus_roots(p, bx, by);
    let mut best: Option<((f64, f64), f64)> = None;
    for r in &roots.roots {
        // The z-winding jumps where w crosses arg w0 and the w-winding where
        // z crosses arg z0, with opposite orientations.
        let cand = (r.w.arg() / PI, -r.z.arg() / PI);
        for sign in [1.0, -1.0] {
            let d = distance_mod_integers(slope, (sign * cand.0, sign * cand.1));
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some(((sign * cand.0, sign * cand.1), d));
            }
        }
    }
    Ok(SlopeReport {
        phase: Phase::Liquid,
        slope,
        argslope: best.map(|b| b.0),
        agreement: best.map(|b| b.1),
        lattice_slope: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amoeba::Window;

    #[test]
    fn argslope_on_triangle() {
        // 1 + z + w has gradient (1/3, 1/3) at the origin by symmetry.
        let p = FloatPoly::from_terms([((0, 0), 1.0), ((1, 0), 1.0), ((0, 1), 1.0)]);
        let r = slope_at(&p, 0.0, 0.0).unwrap();
        assert!((r.slope.0 - 1.0 / 3.0).abs() < 1e-7 && (r.slope.1 - 1.0 / 3.0).abs() < 1e-7);
        assert!(r.agreement.unwrap() < 1e-7, "{r:?}");
    }

    #[test]
    fn distance_mod_integers_wraps() {
        assert!((distance_mod_integers((0.9, -0.2), (-0.1, 0.8)) - 0.0).abs() < 1e-12);
        assert!((distance_mod_integers((0.5, 0.0), (0.0, 0.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sigma_of_monomial_sum_is_finite_only_on_polygon() {
        let p = FloatPoly::from_terms([((0, 0), 1.0), ((1, 0), -1.0)]);
        let g = RonkinGrid::compute(&p, Window::square(3.0), 13, 13, 1e-12).unwrap();
        let solver = TensionSolver::new(&p, &g);
        assert!(solver.sigma(2.0, 0.0).unwrap().value.is_infinite());
        assert!(solver.sigma(0.5, 0.3).unwrap().value.is_infinite());
        // F = max(0, x) up to smoothing, so σ(0.5, 0) = sup (x/2 - F) = 0.
        let v = solver.sigma(0.5, 0.0).unwrap();
        assert!(v.value.abs() < 1e-9, "{v:?}");
    }
}
