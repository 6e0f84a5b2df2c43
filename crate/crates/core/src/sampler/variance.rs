//! Monte-Carlo height variance between faces along a lattice direction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{chain_rng, matching_in_class, Chain, FaceTable};
use crate::amoeba::{phase_of, ronkin_gradient, torus_roots, Phase};
use crate::charpoly::characteristic_polynomial;
use crate::error::{DimerError, Result};
use crate::gibbs::{fit_line, LineFit};
use crate::lattice::{FaceInstance, FundamentalDomain, Matching, TorusGraph};
use crate::FloatPoly;

/// The two candidate coefficients of `log |φ|` in the liquid variance,
/// `1/π²` and `1/π`, against which the fitted slope is reported.
pub const LIQUID_COEFFICIENT_CANDIDATES: [f64; 2] =
    [1.0 / (std::f64::consts::PI * std::f64::consts::PI), 1.0 / std::f64::consts::PI];

#[derive(Clone, Debug, Serialize)]
pub struct VarianceOptions {
    pub n: usize,
    pub samples: usize,
    /// Sweeps before the first sample; `10 n²` when `None`.
    pub burn_in: Option<usize>,
    /// Sweeps between samples; `n²` when `None`.
    pub thin: Option<usize>,
    /// Independent chains sharing the samples.
    pub chains: usize,
    pub seed: u64,
    pub direction: (i32, i32),
    /// Distances in cells; `[4, n/4]` when `None`.
    pub r_range: Option<(usize, usize)>,
}

impl Default for VarianceOptions {
    fn default() -> Self {
        Self { n: 32, samples: 200, burn_in: None, thin: None, chains: 4, seed: 1, direction: (1, 0), r_range: None }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VariancePoint {
    pub r: usize,
    pub phi_distance: f64,
    pub variance: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VarianceProfile {
    pub phase: Phase,
    pub field: (f64, f64),
    pub n: usize,
    pub height_change: (i32, i32),
    /// The chain had no rotatable face, so every sample is the start state.
    pub frozen: bool,
    pub samples: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub points: Vec<VariancePoint>,
    /// Least squares of variance against `log |φ-distance|`.
    pub fit: Option<LineFit>,
    /// `|slope - c|` for each of [`LIQUID_COEFFICIENT_CANDIDATES`].
    pub candidate_gaps: [f64; 2],
}

/// The linear map `φ` of the liquid point (or real node) at the field, as
/// the image of the unit cell vectors.
fn phi_map(p: &FloatPoly, bx: f64, by: f64, phase: Phase) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    if phase != Phase::Liquid {
        return (one, Complex64::new(0.0, 1.0));
    }
    let roots = torus_roots(p, bx, by);
    if let Some(r) = roots.roots.iter().find(|r| !r.node) {
        return (r.alpha * r.z, -r.beta * r.w);
    }
    if let Some(r) = roots.roots.first() {
        // At a real node take the quadratic form a θ² + b θψ + c ψ² of
        // P(z e^iθ, w e^iψ) and a root λ of a + bλ + cλ².
        let (ex, ey) = (bx.exp(), by.exp());
        let f = |t: f64, s: f64| p.eval_complex(r.z * ex * Complex64::from_polar(1.0, t), r.w * ey * Complex64::from_polar(1.0, s));
        let h = 1e-4;
        let f0 = f(0.0, 0.0);
        let a = (f(h, 0.0) + f(-h, 0.0) - 2.0 * f0) / (2.0 * h * h);
        let c = (f(0.0, h) + f(0.0, -h) - 2.0 * f0) / (2.0 * h * h);
        let b = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        let disc = (b * b - 4.0 * a * c).sqrt();
        let lambda = (-b + disc) / (2.0 * c);
        return (-lambda, -one);
    }
    (one, Complex64::new(0.0, 1.0))
}

/// Squared deviations of `h(f + r d) - h(f)` from their exact mean
/// `r (d · H) / n`, averaged over all translates of base face 0.
fn sample_variances(torus: &TorusGraph, m: &Matching, dir: (i32, i32), rs: &[usize]) -> Vec<f64> {
    let n = torus.n as i64;
    let h = torus.height_function(m, FaceInstance { face: 0, cell: (0, 0) });
    let slope = (dir.0 as i64 * h.height_change.0 as i64 + dir.1 as i64 * h.height_change.1 as i64) as f64 / n as f64;
    rs.iter()
        .map(|&r| {
            let mut acc = 0.0;
            for cy in 0..n {
                for cx in 0..n {
                    let a = h.at(torus, 0, (cx, cy));
                    let b = h.at(torus, 0, (cx + r as i64 * dir.0 as i64, cy + r as i64 * dir.1 as i64));
                    let d = (b - a) as f64 - r as f64 * slope;
                    acc += d * d;
                }
            }
            acc / (n * n) as f64
        })
        .collect()
}

/// Height variance profile on `G_n` at the field `(bx, by)`.
///
/// The chain starts in the height-change class nearest `n ∇F(bx, by)`, the
/// dominant class of the torus measure at that field, and moves by face
/// rotations, which keep the class.
pub fn variance_profile(domain: &FundamentalDomain, bx: f64, by: f64, opts: &VarianceOptions) -> Result<VarianceProfile> {
    let n = opts.n;
    if n < 2 || opts.samples < 2 || opts.chains == 0 {
        return Err(DimerError::InvalidArgument("need n ≥ 2, at least 2 samples and one chain".into()));
    }
    let p = characteristic_polynomial(domain)?;
    let phase = phase_of(&p, bx, by)?.phase;
    let slope = ronkin_gradient(&p, bx, by);
    let target = ((slope.0 * n as f64).round() as i32, (slope.1 * n as f64).round() as i32);
    let torus = domain.torus(n)?;
    let initial = matching_in_class(&torus, target)?;
    let faces = FaceTable::new(&torus);
    let burn_in = opts.burn_in.unwrap_or(10 * n * n);
    let thin = opts.thin.unwrap_or(n * n);
    let (rmin, rmax) = opts.r_range.unwrap_or((4, (n / 4).max(4)));
    let rs: Vec<usize> = (rmin..=rmax).collect();
    let per_chain = opts.samples.div_ceil(opts.chains);
    let chains: Vec<Result<(bool, Vec<Vec<f64>>)>> = (0..opts.chains)
        .into_par_iter()
        .map(|ci| {
            let mut chain = Chain::new(&torus, &faces, initial.clone(), chain_rng(opts.seed, ci as u64))?;
            if chain.is_frozen() {
                return Ok((true, vec![sample_variances(&torus, chain.matching(), opts.direction, &rs)]));
            }
            chain.run(burn_in);
            let mut out = Vec::with_capacity(per_chain);
            for _ in 0..per_chain {
                chain.run(thin);
                out.push(sample_variances(&torus, chain.matching(), opts.direction, &rs));
            }
            Ok((false, out))
        })
        .collect();
    let mut frozen = false;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for c in chains {
        let (f, r) = c?;
        frozen |= f;
        rows.extend(r);
    }
    rows.truncate(opts.samples);
    let (ax, ay) = phi_map(&p, bx, by, phase);
    let count = rows.len() as f64;
    let points: Vec<VariancePoint> = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mean = rows.iter().map(|v| v[i]).sum::<f64>() / count;
            let var = if rows.len() > 1 {
                rows.iter().map(|v| (v[i] - mean).powi(2)).sum::<f64>() / (count - 1.0)
            } else {
                0.0
            };
            let phi = (ax * (r as f64 * opts.direction.0 as f64) + ay * (r as f64 * opts.direction.1 as f64)).norm();
            VariancePoint { r, phi_distance: phi, variance: mean, std_error: (var / count).sqrt() }
        })
        .collect();
    let fit = fit_line(&points.iter().map(|pt| (pt.phi_distance.ln(), pt.variance)).collect::<Vec<_>>());
    let candidate_gaps = match fit {
        Some(f) => LIQUID_COEFFICIENT_CANDIDATES.map(|c| (f.slope - c).abs()),
        None => [f64::NAN; 2],
    };
    Ok(VarianceProfile {
        phase,
        field: (bx, by),
        n,
        height_change: torus.height_change(&initial),
        frozen,
        samples: rows.len(),
        burn_in,
        thin,
        seed: opts.seed,
        points,
        fit,
        candidate_gaps,
    })
}
