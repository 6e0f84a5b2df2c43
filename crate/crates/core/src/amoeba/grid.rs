//! Rasterized amoebae, complement components and Ronkin grids.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{amoeba_contains, ronkin_gradient, ronkin_with_tolerance, Phase};
use crate::error::{DimerError, Result};
use crate::newton::{newton_polygon, NewtonPolygon};
use crate::FloatPoly;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Window {
    pub fn square(half: f64) -> Self {
        Self { xmin: -half, xmax: half, ymin: -half, ymax: half }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let cx = 0.5 * (self.xmin + self.xmax);
        let cy = 0.5 * (self.ymin + self.ymax);
        let hx = 0.5 * (self.xmax - self.xmin) * factor;
        let hy = 0.5 * (self.ymax - self.ymin) * factor;
        Self { xmin: cx - hx, xmax: cx + hx, ymin: cy - hy, ymax: cy + hy }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    /// Center of cell `(ix, iy)` in an `nx` by `ny` raster.
    pub fn cell_center(&self, nx: usize, ny: usize, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.xmin + (ix as f64 + 0.5) * self.width() / nx as f64,
            self.ymin + (iy as f64 + 0.5) * self.height() / ny as f64,
        )
    }
}

/// A square window centered at the origin that contains the bounded part
/// of the amoeba, sized from the spread of log-coefficients.
pub fn suggest_window(p: &FloatPoly) -> Window {
    let logs: Vec<f64> = p.terms().map(|(_, c)| c.abs().ln()).collect();
    let spread = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let half = if spread.is_finite() { spread + 4.0 } else { 4.0 };
    Window::square(half)
}

#[derive(Clone, Debug, Serialize)]
pub struct RonkinGrid {
    pub window: Window,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major values, `values[iy * xs.len() + ix]`.
    pub values: Vec<f64>,
    /// Largest quadrature error estimate over the grid.
    pub error: f64,
}

impl RonkinGrid {
    /// Ronkin function on an `nx` by `ny` grid of nodes spanning the window.
    pub fn compute(p: &FloatPoly, window: Window, nx: usize, ny: usize, tolerance: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(DimerError::InvalidArgument("Ronkin grid needs at least 2 nodes per axis".into()));
        }
        let xs: Vec<f64> = (0..nx).map(|i| window.xmin + window.width() * i as f64 / (nx - 1) as f64).collect();
        let ys: Vec<f64> = (0..ny).map(|i| window.ymin + window.height() * i as f64 / (ny - 1) as f64).collect();
        let cells: Vec<Result<(f64, f64)>> = (0..nx * ny)
            .into_par_iter()
            .map(|i| ronkin_with_tolerance(p, xs[i % nx], ys[i / nx], tolerance).map(|r| (r.value, r.error)))
            .collect();
        let mut values = Vec::with_capacity(nx * ny);
        let mut error: f64 = 0.0;
        for c in cells {
            let (v, e) = c?;
            values.push(v);
            error = error.max(e);
        }
        Ok(Self { window, xs, ys, values, error })
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx() + ix]
    }

    pub fn dx(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn dy(&self) -> f64 {
        self.ys[1] - self.ys[0]
    }

    /// Finite-difference gradient at a node, one-sided on the border.
    pub fn gradient(&self, ix: usize, iy: usize) -> (f64, f64) {
        let (nx, ny) = (self.nx(), self.ny());
        let (l, r) = (ix.saturating_sub(1), (ix + 1).min(nx - 1));
        let (b, t) = (iy.saturating_sub(1), (iy + 1).min(ny - 1));
        let gx = (self.at(r, iy) - self.at(l, iy)) / (self.xs[r] - self.xs[l]);
        let gy = (self.at(ix, t) - self.at(ix, b)) / (self.ys[t] - self.ys[b]);
        (gx, gy)
    }

    /// Hessian by centered second differences with the given node step.
    pub fn hessian(&self, ix: usize, iy: usize, step: usize) -> Option<[[f64; 2]; 2]> {
        if ix < step || iy < step || ix + step >= self.nx() || iy + step >= self.ny() {
            return None;
        }
        let hx = self.dx() * step as f64;
        let hy = self.dy() * step as f64;
        let f = |a: isize, b: isize| self.at((ix as isize + a * step as isize) as usize, (iy as isize + b * step as isize) as usize);
        let fxx = (f(1, 0) - 2.0 * f(0, 0) + f(-1, 0)) / (hx * hx);
        let fyy = (f(0, 1) - 2.0 * f(0, 0) + f(0, -1)) / (hy * hy);
        let fxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4.0 * hx * hy);
        Some([[fxx, fxy], [fxy, fyy]])
    }

    /// Bilinear interpolation inside the window.
    pub fn interpolate(&self, x: f64, y: f64) -> Option<f64> {
        let w = &self.window;
        if x < w.xmin || x > w.xmax || y < w.ymin || y > w.ymax {
            return None;
        }
        let fx = ((x - w.xmin) / self.dx()).min((self.nx() - 1) as f64 - 1e-12);
        let fy = ((y - w.ymin) / self.dy()).min((self.ny() - 1) as f64 - 1e-12);
        let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
        let (u, v) = (fx - ix as f64, fy - iy as f64);
        Some(
            (1.0 - u) * (1.0 - v) * self.at(ix, iy)
                + u * (1.0 - v) * self.at(ix + 1, iy)
                + (1.0 - u) * v * self.at(ix, iy + 1)
                + u * v * self.at(ix + 1, iy + 1),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    Bounded,
    SemiBounded,
    Unbounded,
}

impl std::fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ComponentKind::Bounded => "bounded",
            ComponentKind::SemiBounded => "semi-bounded",
            ComponentKind::Unbounded => "unbounded",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub id: usize,
    pub kind: ComponentKind,
    pub slope: (i32, i32),
    /// Distance of the Ronkin gradient from `slope` at the representative.
    pub slope_residual: f64,
    pub representative: (f64, f64),
    pub cells: usize,
}

impl Component {
    pub fn phase(&self) -> Phase {
        match self.kind {
            ComponentKind::Bounded => Phase::Gaseous,
            _ => Phase::Frozen,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseDiagram {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    /// Row-major cell labels: `-1` for the amoeba, otherwise a component id.
    pub labels: Vec<i32>,
    pub components: Vec<Component>,
}

impl PhaseDiagram {
    pub fn label(&self, ix: usize, iy: usize) -> i32 {
        self.labels[iy * self.nx + ix]
    }

    pub fn phase(&self, ix: usize, iy: usize) -> Phase {
        match self.label(ix, iy) {
            -1 => Phase::Liquid,
            k => self.components[k as usize].phase(),
        }
    }

    pub fn count(&self, kind: ComponentKind) -> usize {
        self.components.iter().filter(|c| c.kind == kind).count()
    }

    /// Cells of component `id` as `(ix, iy)` pairs.
    pub fn cells_of(&self, id: usize) -> Vec<(usize, usize)> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == id as i32)
            .map(|i| (i % self.nx, i / self.nx))
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    pub resolution: usize,
    /// Ratio of border contact length after enlarging the window by half
    /// above which a component counts as unbounded rather than semi-bounded.
    pub growth_threshold: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { resolution: 400, growth_threshold: 1.25 }
    }
}

pub fn amoeba_grid(p: &FloatPoly, window: Window, resolution: usize) -> Result<PhaseDiagram> {
    amoeba_grid_with(p, window, GridOptions { resolution, ..GridOptions::default() })
}

/// Complement components grouped by slope, before boundedness analysis.
struct Raster {
    labels: Vec<i32>,
    groups: Vec<RasterGroup>,
}

struct RasterGroup {
    slope: (i32, i32),
    residual: f64,
    representative: (f64, f64),
    depth: u32,
    cells: usize,
    contact: f64,
}

fn rasterize(p: &FloatPoly, newton: &NewtonPolygon, window: Window, n: usize) -> Result<Raster> {
    let members: Vec<super::Membership> = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (x, y) = window.cell_center(n, n, i % n, i / n);
            amoeba_contains(p, x, y)
        })
        .collect();
    let inside: Vec<bool> = members.iter().map(|m| m.inside).collect();

    // Chessboard distance to the nearest amoeba cell, by multi-source BFS.
    let mut depth = vec![u32::MAX; n * n];
    let mut queue = VecDeque::new();
    for i in 0..n * n {
        if inside[i] {
            depth[i] = 0;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (ix, iy) = ((i % n) as isize, (i / n) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (jx, jy) = (ix + dx, iy + dy);
                if jx < 0 || jy < 0 || jx >= n as isize || jy >= n as isize {
                    continue;
                }
                let j = jy as usize * n + jx as usize;
                if depth[j] == u32::MAX {
                    depth[j] = depth[i] + 1;
                    queue.push_back(j);
                }
            }
        }
    }

    // Flood fill; neighbours join only when all four factor signs agree,
    // which keeps components apart across tentacles thinner than a cell.
    let mut raw = vec![-1i32; n * n];
    let mut raw_info: Vec<(usize, [i8; 4], usize)> = Vec::new();
    for start in 0..n * n {
        if inside[start] || raw[start] >= 0 {
            continue;
        }
        let id = raw_info.len() as i32;
        let signs = members[start].signs;
        let mut deepest = start;
        let mut size = 0;
        raw[start] = id;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            size += 1;
            if depth[i] > depth[deepest] {
                deepest = i;
            }
            let (ix, iy) = (i % n, i / n);
            let mut nbrs = [usize::MAX; 4];
            if ix > 0 {
                nbrs[0] = i - 1;
            }
            if ix + 1 < n {
                nbrs[1] = i + 1;
            }
            if iy > 0 {
                nbrs[2] = i - n;
            }
            if iy + 1 < n {
                nbrs[3] = i + n;
            }
            for j in nbrs {
                if j != usize::MAX && !inside[j] && raw[j] < 0 && members[j].signs == signs {
                    raw[j] = id;
                    queue.push_back(j);
                }
            }
        }
        raw_info.push((deepest, signs, size));
    }

    let slopes: Vec<((f64, f64), (f64, f64))> = raw_info
        .par_iter()
        .map(|&(deepest, _, _)| {
            let c = window.cell_center(n, n, deepest % n, deepest / n);
            (c, ronkin_gradient(p, c.0, c.1))
        })
        .collect();

    let cell_len = window.width() / n as f64;
    let mut by_slope: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    let mut groups: Vec<RasterGroup> = Vec::new();
    let mut group_signs: Vec<[i8; 4]> = Vec::new();
    let mut raw_to_group = vec![-1i32; raw_info.len()];
    for (r, &(deepest, signs, size)) in raw_info.iter().enumerate() {
        let (center, g) = slopes[r];
        let slope = (g.0.round() as i32, g.1.round() as i32);
        let residual = (g.0 - slope.0 as f64).abs().max((g.1 - slope.1 as f64).abs());
        if residual > 0.05 || !newton.contains_lattice_point(slope) {
            // Boundary noise: a sliver whose center lies on the amoeba edge.
            continue;
        }
        let gi = *by_slope.entry(slope).or_insert_with(|| {
            groups.push(RasterGroup { slope, residual, representative: center, depth: 0, cells: 0, contact: 0.0 });
            group_signs.push(signs);
            groups.len() - 1
        });
        if group_signs[gi] != signs && size > 4 && groups[gi].cells > 4 {
            return Err(DimerError::InvalidArgument(format!(
                "raster too coarse: two separated regions share slope {slope:?}"
            )));
        }
        let grp = &mut groups[gi];
        if depth[deepest] > grp.depth {
            grp.depth = depth[deepest];
            grp.representative = center;
            grp.residual = residual;
        }
        grp.cells += size;
        raw_to_group[r] = gi as i32;
    }
    if groups.len() > newton.lattice_point_count() {
        return Err(DimerError::InvalidArgument(format!(
            "raster too coarse: {} components exceed {} lattice points",
            groups.len(),
            newton.lattice_point_count()
        )));
    }

    let labels: Vec<i32> = raw.iter().map(|&r| if r < 0 { -1 } else { raw_to_group[r as usize] }).collect();
    for i in 0..n {
        for idx in [i, (n - 1) * n + i, i * n, i * n + n - 1] {
            if labels[idx] >= 0 {
                groups[labels[idx] as usize].contact += cell_len;
            }
        }
    }
    Ok(Raster { labels, groups })
}

/// Rasterizes the amoeba and classifies complement components. Components
/// touching the window border are compared against a window enlarged by
/// half: unbounded components have border contact growing with the window,
/// semi-bounded strips keep constant contact, and bounded ones lose it.
pub fn amoeba_grid_with(p: &FloatPoly, window: Window, options: GridOptions) -> Result<PhaseDiagram> {
    let n = options.resolution;
    if n < 8 {
        return Err(DimerError::InvalidArgument("raster resolution must be at least 8".into()));
    }
    if p.is_zero() {
        return Err(DimerError::InvalidArgument("amoeba of the zero polynomial".into()));
    }
    let newton = newton_polygon(p);
    let base = rasterize(p, &newton, window, n)?;
    let needs_growth = base.groups.iter().any(|g| g.contact > 0.0);
    let grown = if needs_growth { Some(rasterize(p, &newton, window.scaled(1.5), n)?) } else { None };
    let components = base
        .groups
        .iter()
        .enumerate()
        .map(|(id, g)| {
            let kind = match &grown {
                Some(big) if g.contact > 0.0 => {
                    let contact = big.groups.iter().find(|h| h.slope == g.slope).map_or(0.0, |h| h.contact);
                    if contact == 0.0 {
                        ComponentKind::Bounded
                    } else if contact > options.growth_threshold * g.contact {
                        ComponentKind::Unbounded
                    } else {
                        ComponentKind::SemiBounded
                    }
                }
                _ => ComponentKind::Bounded,
            };
            Component {
                id,
                kind,
                slope: g.slope,
                slope_residual: g.residual,
                representative: g.representative,
                cells: g.cells,
            }
        })
        .collect();
    Ok(PhaseDiagram { window, nx: n, ny: n, labels: base.labels, components })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub area: f64,
    pub std_error: f64,
    pub window: Window,
    pub cells: usize,
}

/// Amoeba area by stratified Monte Carlo: one jittered sample per cell of
/// an `m` by `m` raster. The error comes from the spread of 16 interleaved
/// sub-estimates.
pub fn amoeba_area(p: &FloatPoly, window: Window, m: usize, seed: u64) -> AreaEstimate {
    const GROUPS: usize = 16;
    let cw = window.width() / m as f64;
    let ch = window.height() / m as f64;
    let rows: Vec<[usize; GROUPS]> = (0..m)
        .into_par_iter()
        .map(|iy| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (iy as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut counts = [0usize; GROUPS];
            for ix in 0..m {
                let x = window.xmin + (ix as f64 + rng.random::<f64>()) * cw;
                let y = window.ymin + (iy as f64 + rng.random::<f64>()) * ch;
                if amoeba_contains(p, x, y).inside {
                    counts[(ix + iy * m) % GROUPS] += 1;
                }
            }
            counts
        })
        .collect();
    let mut counts = [0usize; GROUPS];
    for r in rows {
        for g in 0..GROUPS {
            counts[g] += r[g];
        }
    }
    let cell_area = cw * ch;
    let estimates: Vec<f64> = counts.iter().map(|&c| c as f64 * cell_area * GROUPS as f64).collect();
    let mean = estimates.iter().sum::<f64>() / GROUPS as f64;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (GROUPS - 1) as f64;
    AreaEstimate { area: mean, std_error: (var / GROUPS as f64).sqrt(), window, cells: m * m }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_scaling_keeps_center() {
        let w = Window { xmin: -1.0, xmax: 3.0, ymin: 0.0, ymax: 2.0 }.scaled(1.5);
        assert_eq!((w.xmin, w.xmax, w.ymin, w.ymax), (-2.0, 4.0, -0.5, 2.5));
    }

    #[test]
    fn ronkin_grid_of_linear_function() {
        let p = FloatPoly::monomial(1, 2, 1.0);
        let g = RonkinGrid::compute(&p, Window::square(1.0), 5, 5, 1e-12).unwrap();
        let (gx, gy) = g.gradient(2, 2);
        assert!((gx - 1.0).abs() < 1e-10 && (gy - 2.0).abs() < 1e-10);
        let h = g.hessian(2, 2, 1).unwrap();
        assert!(h.iter().flatten().all(|v| v.abs() < 1e-8));
        assert!((g.interpolate(0.3, -0.2).unwrap() - (0.3 - 0.4)).abs() < 1e-10);
    }
}
