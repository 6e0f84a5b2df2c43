//! Double-dimer loops around a face.

use rayon::prelude::*;
use serde::Serialize;

use super::{chain_rng, matching_in_class, Chain, FaceTable};
use crate::amoeba::{phase_of, ronkin_gradient, Phase};
use crate::charpoly::characteristic_polynomial;
use crate::error::{DimerError, Result};
use crate::lattice::{FaceInstance, FundamentalDomain, Matching, TorusGraph};

/// Winding number of a closed polygon around `p`.
fn winding(poly: &[[f64; 2]], p: [f64; 2]) -> i32 {
    let mut wn = 0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Number of cycles of `m1 ∪ m2` that surround the face instance `face`.
/// Doubled edges and cycles winding around the torus surround nothing.
pub fn double_dimer_loops(torus: &TorusGraph, faces: &FaceTable, m1: &Matching, m2: &Matching, face: usize) -> usize {
    double_dimer_loops_around(torus, faces, m1, m2, &[face])[0]
}

/// [`double_dimer_loops`] for several faces, tracing the cycles once.
pub fn double_dimer_loops_around(
    torus: &TorusGraph,
    faces: &FaceTable,
    m1: &Matching,
    m2: &Matching,
    targets: &[usize],
) -> Vec<usize> {
    let d = &torus.base;
    let n = torus.n as f64;
    let mut m2_by_black = vec![0; torus.num_blacks()];
    for &e in &m2.by_white {
        m2_by_black[torus.edge(e).black] = e;
    }
    let mut seen = vec![false; torus.num_whites()];
    let mut counts = vec![0; targets.len()];
    for start in 0..torus.num_whites() {
        if seen[start] || m1.by_white[start] == m2.by_white[start] {
            continue;
        }
        let cell0 = torus.edge(m1.by_white[start]).cell;
        let mut cell = (cell0.0 as i64, cell0.1 as i64);
        let mut poly = Vec::new();
        let mut w = start;
        loop {
            seen[w] = true;
            let e1 = torus.edge(m1.by_white[w]);
            let base1 = &d.edges[e1.base];
            let pw = d.whites[base1.white].pos;
            poly.push([pw[0] + cell.0 as f64, pw[1] + cell.1 as f64]);
            let bcell = (cell.0 + base1.offset.0 as i64, cell.1 + base1.offset.1 as i64);
            let pb = d.blacks[base1.black].pos;
            poly.push([pb[0] + bcell.0 as f64, pb[1] + bcell.1 as f64]);
            let e2 = torus.edge(m2_by_black[e1.black]);
            let base2 = &d.edges[e2.base];
            cell = (bcell.0 - base2.offset.0 as i64, bcell.1 - base2.offset.1 as i64);
            w = e2.white;
            if w == start {
                break;
            }
        }
        if cell != (cell0.0 as i64, cell0.1 as i64) {
            continue;
        }
        // The lift is a closed polygon bounding a disk; the face is inside
        // when one of its lifts is.
        let (lo, hi) = poly.iter().fold(([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]), |(lo, hi), q| {
            ([lo[0].min(q[0]), lo[1].min(q[1])], [hi[0].max(q[0]), hi[1].max(q[1])])
        });
        for (count, &face) in counts.iter_mut().zip(targets) {
            let center = faces.centers[face];
            let kx = ((lo[0] - center[0]) / n).floor() as i64..=((hi[0] - center[0]) / n).ceil() as i64;
            let inside = kx.into_iter().any(|kx| {
                let ky = ((lo[1] - center[1]) / n).floor() as i64..=((hi[1] - center[1]) / n).ceil() as i64;
                ky.into_iter().any(|ky| winding(&poly, [center[0] + kx as f64 * n, center[1] + ky as f64 * n]) != 0)
            });
            if inside {
                *count += 1;
            }
        }
    }
    counts
}

/// Standard error of the mean of a correlated series from up to 50
/// consecutive batches.
fn batch_std_error(counts: &[f64]) -> f64 {
    let batches = counts.len().min(50);
    if batches < 2 {
        return f64::NAN;
    }
    let size = counts.len() / batches;
    let means: Vec<f64> =
        counts.chunks_exact(size).take(batches).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    let b = means.len() as f64;
    let mean = means.iter().sum::<f64>() / b;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    (var / b).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopOptions {
    pub sizes: Vec<usize>,
    pub runs: usize,
    /// Sweeps before the first run; `10 n²` when `None`.
    pub burn_in: Option<usize>,
    /// Sweeps between runs; `4 n` when `None`.
    pub thin: Option<usize>,
    pub seed: u64,
}

impl Default for LoopOptions {
    fn default() -> Self {
        Self { sizes: vec![8, 16, 32], runs: 2000, burn_in: None, thin: None, seed: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopRun {
    pub n: usize,
    pub runs: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Translates of the center face averaged in each run.
    pub translates: usize,
    pub mean: f64,
    /// Standard error of the mean from batch means, which absorbs the
    /// correlation between successive runs of the chains.
    pub std_error: f64,
    /// `histogram[k]` runs had `k` loops around the center face.
    pub histogram: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopCensus {
    pub phase: Phase,
    pub field: (f64, f64),
    pub seed: u64,
    pub runs: Vec<LoopRun>,
}

/// Loop counts around the center face of `G_n`, averaged over its
/// translates on a coarse sublattice, for each size, from pairs of
/// independent face-rotation chains started in the dominant height-change
/// class of the field.
pub fn loop_census(domain: &FundamentalDomain, bx: f64, by: f64, opts: &LoopOptions) -> Result<LoopCensus> {
    if opts.runs == 0 {
        return Err(DimerError::InvalidArgument("need at least one run".into()));
    }
    let p = characteristic_polynomial(domain)?;
    let phase = phase_of(&p, bx, by)?.phase;
    let slope = ronkin_gradient(&p, bx, by);
    let runs: Vec<Result<LoopRun>> = opts
        .sizes
        .par_iter()
        .enumerate()
        .map(|(si, &n)| {
            let torus = domain.torus(n)?;
            let target = ((slope.0 * n as f64).round() as i32, (slope.1 * n as f64).round() as i32);
            let initial = matching_in_class(&torus, target)?;
            let faces = FaceTable::new(&torus);
            // Translates of the center face on a 4 x 4 sublattice: the torus
            // measure is translation invariant, so each has the same mean.
            let step = (n / 4).max(1);
            let mut targets: Vec<usize> = (0..4)
                .flat_map(|i| (0..4).map(move |j| ((n / 2 + i * step) % n, (n / 2 + j * step) % n)))
                .map(|cell| torus.face_index(FaceInstance { face: 0, cell }))
                .collect();
            targets.dedup();
            targets[1..].sort_unstable();
            targets.dedup();
            let burn_in = opts.burn_in.unwrap_or(10 * n * n);
            let thin = opts.thin.unwrap_or(4 * n);
            let mut a = Chain::new(&torus, &faces, initial.clone(), chain_rng(opts.seed, 2 * si as u64))?;
            let mut b = Chain::new(&torus, &faces, initial, chain_rng(opts.seed, 2 * si as u64 + 1))?;
            a.run(burn_in);
            b.run(burn_in);
            let mut counts = Vec::with_capacity(opts.runs);
            let mut averages = Vec::with_capacity(opts.runs);
            for _ in 0..opts.runs {
                a.run(thin);
                b.run(thin);
                let around = double_dimer_loops_around(&torus, &faces, a.matching(), b.matching(), &targets);
                counts.push(around[0]);
                averages.push(around.iter().sum::<usize>() as f64 / around.len() as f64);
            }
            let mean = averages.iter().sum::<f64>() / averages.len() as f64;
            let std_error = batch_std_error(&averages);
            let mut histogram = vec![0; counts.iter().max().map_or(0, |&m| m + 1)];
            for c in counts {
                histogram[c] += 1;
            }
            Ok(LoopRun { n, runs: opts.runs, burn_in, thin, translates: targets.len(), mean, std_error, histogram })
        })
        .collect();
    Ok(LoopCensus { phase, field: (bx, by), seed: opts.seed, runs: runs.into_iter().collect::<Result<_>>()? })
}
