//! CSV tables and SVG figures. Every number is written with six
//! significant digits so that outputs are byte-identical across runs.

use std::fmt::Write as _;

use crate::amoeba::{Phase, PhaseDiagram, RonkinGrid};
use crate::error::{DimerError, Result};
use crate::sampler::{LoopCensus, VarianceProfile};
use crate::tension::SurfaceTensionGrid;

/// Six significant digits, fixed notation for exponents in `[-5, 6)` and
/// scientific otherwise, trailing zeros trimmed.
pub fn fmt6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..6).contains(&exp) {
        let digits = (5 - exp).max(0) as usize;
        trim(&format!("{v:.digits$}")).to_string()
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV table with a header row.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| DimerError::InvalidArgument(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| DimerError::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Cell centers with their component label (`-1` for the amoeba) and phase.
pub fn phase_csv(d: &PhaseDiagram) -> Result<String> {
    let rows = (0..d.ny).flat_map(|iy| {
        (0..d.nx).map(move |ix| {
            let (x, y) = d.window.cell_center(d.nx, d.ny, ix, iy);
            vec![fmt6(x), fmt6(y), d.label(ix, iy).to_string(), d.phase(ix, iy).to_string()]
        })
    });
    csv_table(&["x", "y", "label", "phase"], rows)
}

pub fn ronkin_csv(g: &RonkinGrid) -> Result<String> {
    let rows = (0..g.ny()).flat_map(|iy| (0..g.nx()).map(move |ix| vec![fmt6(g.xs[ix]), fmt6(g.ys[iy]), fmt6(g.at(ix, iy))]));
    csv_table(&["x", "y", "ronkin"], rows)
}

pub fn tension_csv(g: &SurfaceTensionGrid) -> Result<String> {
    let ns = g.ss.len();
    let rows = (0..g.values.len()).map(|i| {
        let (ax, ay) = g.argmax[i];
        vec![fmt6(g.ss[i % ns]), fmt6(g.ts[i / ns]), fmt6(g.values[i]), fmt6(ax), fmt6(ay)]
    });
    csv_table(&["s", "t", "sigma", "argmax_x", "argmax_y"], rows)
}

/// Correlation table rows `(offset x, offset y, value, error)`.
pub fn correlation_csv(rows: &[((i32, i32), f64, f64)]) -> Result<String> {
    let rows = rows.iter().map(|&((x, y), v, e)| vec![x.to_string(), y.to_string(), fmt6(v), fmt6(e)]);
    csv_table(&["x", "y", "value", "error"], rows)
}

pub fn variance_csv(v: &VarianceProfile) -> Result<String> {
    let rows = v.points.iter().map(|p| vec![p.r.to_string(), fmt6(p.phi_distance), fmt6(p.variance), fmt6(p.std_error)]);
    csv_table(&["r", "phi_distance", "variance", "std_error"], rows)
}

pub fn loops_csv(c: &LoopCensus) -> Result<String> {
    let rows = c.runs.iter().map(|r| {
        vec![r.n.to_string(), r.runs.to_string(), r.burn_in.to_string(), r.thin.to_string(), fmt6(r.mean), fmt6(r.std_error)]
    });
    csv_table(&["n", "runs", "burn_in", "thin", "mean", "std_error"], rows)
}

const SVG_SIZE: f64 = 600.0;

fn svg_open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt6(width),
        fmt6(height),
        fmt6(width),
        fmt6(height)
    );
}

fn phase_color(phase: Phase) -> &'static str {
    match phase {
        Phase::Liquid => "#4a7dbf",
        Phase::Gaseous => "#f2c14e",
        Phase::Frozen => "#e8e8e8",
    }
}

/// Raster of phases with the outline of every complement component.
pub fn phase_svg(d: &PhaseDiagram) -> String {
    let cw = SVG_SIZE / d.nx as f64;
    let ch = SVG_SIZE / d.ny as f64;
    // Image rows run top to bottom, the y axis bottom to top.
    let top = |iy: usize| SVG_SIZE - (iy + 1) as f64 * ch;
    let mut out = String::new();
    svg_open(&mut out, SVG_SIZE, SVG_SIZE);
    for iy in 0..d.ny {
        // Merge runs of equal phase along a row into one rect.
        let mut ix = 0;
        while ix < d.nx {
            let phase = d.phase(ix, iy);
            let start = ix;
            while ix < d.nx && d.phase(ix, iy) == phase {
                ix += 1;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                fmt6(start as f64 * cw),
                fmt6(top(iy)),
                fmt6((ix - start) as f64 * cw),
                fmt6(ch),
                phase_color(phase)
            );
        }
    }
    let mut path = String::new();
    for iy in 0..d.ny {
        for ix in 0..d.nx {
            let l = d.label(ix, iy);
            if l < 0 {
                continue;
            }
            let (x0, y0) = (ix as f64 * cw, top(iy));
            if ix + 1 == d.nx || d.label(ix + 1, iy) != l {
                let _ = write!(path, "M{} {}V{}", fmt6(x0 + cw), fmt6(y0), fmt6(y0 + ch));
            }
            if ix == 0 || d.label(ix - 1, iy) != l {
                let _ = write!(path, "M{} {}V{}", fmt6(x0), fmt6(y0), fmt6(y0 + ch));
            }
            if iy + 1 == d.ny || d.label(ix, iy + 1) != l {
                let _ = write!(path, "M{} {}H{}", fmt6(x0), fmt6(y0), fmt6(x0 + cw));
            }
            if iy == 0 || d.label(ix, iy - 1) != l {
                let _ = write!(path, "M{} {}H{}", fmt6(x0), fmt6(y0 + ch), fmt6(x0 + cw));
            }
        }
    }
    if !path.is_empty() {
        let _ = writeln!(out, r##"<path d="{path}" fill="none" stroke="#222" stroke-width="1"/>"##);
    }
    out.push_str("</svg>\n");
    out
}

/// Level-set segments of a row-major grid by marching squares.
fn contour_segments(xs: &[f64], ys: &[f64], values: &[f64], level: f64) -> Vec<[(f64, f64); 2]> {
    let nx = xs.len();
    let v = |ix: usize, iy: usize| values[iy * nx + ix];
    let mut segs = Vec::new();
    for iy in 0..ys.len().saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            let corners = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)];
            if corners.iter().any(|&(a, b)| !v(a, b).is_finite()) {
                continue;
            }
            let mut hits = Vec::with_capacity(4);
            for k in 0..4 {
                let (a, b) = (corners[k], corners[(k + 1) % 4]);
                let (va, vb) = (v(a.0, a.1), v(b.0, b.1));
                if (va < level) != (vb < level) {
                    let t = (level - va) / (vb - va);
                    hits.push((xs[a.0] + t * (xs[b.0] - xs[a.0]), ys[a.1] + t * (ys[b.1] - ys[a.1])));
                }
            }
            // Saddles give four crossings; pair them in boundary order.
            for pair in hits.chunks_exact(2) {
                segs.push([pair[0], pair[1]]);
            }
        }
    }
    segs
}

/// Contour plot of a row-major grid of values at `levels` evenly spaced
/// levels between the finite extremes.
pub fn contour_svg(xs: &[f64], ys: &[f64], values: &[f64], levels: usize) -> Result<String> {
    if xs.len() < 2 || ys.len() < 2 || values.len() != xs.len() * ys.len() {
        return Err(DimerError::InvalidArgument("contour grid needs at least 2 x 2 values".into()));
    }
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1, y0, y1) = (xs[0], xs[xs.len() - 1], ys[0], ys[ys.len() - 1]);
    let sx = SVG_SIZE / (x1 - x0);
    let sy = SVG_SIZE / (y1 - y0);
    let map = |(x, y): (f64, f64)| ((x - x0) * sx, SVG_SIZE - (y - y0) * sy);
    let mut out = String::new();
    svg_open(&mut out, SVG_SIZE, SVG_SIZE);
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{0}" height="{0}" fill="#fff" stroke="#222"/>"##, fmt6(SVG_SIZE));
    if lo.is_finite() && hi > lo {
        for k in 1..=levels {
            let level = lo + (hi - lo) * k as f64 / (levels + 1) as f64;
            let mut d = String::new();
            for [a, b] in contour_segments(xs, ys, values, level) {
                let (a, b) = (map(a), map(b));
                let _ = write!(d, "M{} {}L{} {}", fmt6(a.0), fmt6(a.1), fmt6(b.0), fmt6(b.1));
            }
            if !d.is_empty() {
                let _ = writeln!(
                    out,
                    r##"<path d="{d}" fill="none" stroke="#1f4e79" stroke-width="1" data-level="{}"/>"##,
                    fmt6(level)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
