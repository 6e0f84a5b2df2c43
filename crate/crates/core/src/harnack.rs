//! Maximality of spectral curves: the transfer-matrix form of `P` on the
//! hexagonal lattice, the eigenvalue pattern of the monodromy, the 2-to-1
//! property of the amoeba map and the amoeba area.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amoeba::{amoeba_area, suggest_window, torus_roots_with, AreaEstimate};
use crate::charpoly::characteristic_polynomial;
use crate::error::{DimerError, Result};
use crate::lattice::{EdgeSpec, FundamentalDomain, Vertex};
use crate::newton::newton_polygon;
use crate::FloatPoly;

/// Relative gap below which two eigenvalue moduli count as tied.
pub const GAP_TOLERANCE: f64 = 1e-8;

/// Edge weights of the hexagonal lattice with an `n x n` fundamental
/// domain, indexed `[row][column]`. White `(i, j)` meets black `(i, j)`
/// with weight `a`, black `(i + 1, j)` with weight `b` and black `(i, j + 1)`
/// with weight `c`.
#[derive(Clone, Debug, Serialize)]
pub struct HexWeights {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
}

impl HexWeights {
    pub fn uniform(n: usize) -> Self {
        let one = vec![vec![1.0; n]; n];
        Self { a: one.clone(), b: one.clone(), c: one }
    }

    /// Weights drawn uniformly from `[lo, hi]`.
    pub fn random(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Self {
        let mut draw = || (0..n).map(|_| (0..n).map(|_| rng.random_range(lo..=hi)).collect()).collect();
        Self { a: draw(), b: draw(), c: draw() }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(DimerError::InvalidArgument("empty weight array".into()));
        }
        for arr in [&self.a, &self.b, &self.c] {
            if arr.len() != n || arr.iter().any(|row| row.len() != n) {
                return Err(DimerError::InvalidArgument("weight arrays must all be n x n".into()));
            }
            if arr.iter().flatten().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(DimerError::InvalidArgument("hexagonal weights must be positive".into()));
            }
        }
        Ok(())
    }

    /// The periodic graph itself. Columns run right to left, so the
    /// horizontal wrap of the `b` edges crosses the left side of the cell.
    pub fn domain(&self) -> Result<FundamentalDomain> {
        self.validate()?;
        let n = self.n();
        let nf = n as f64;
        let idx = |i: usize, j: usize| i + n * j;
        let mut whites = Vec::with_capacity(n * n);
        let mut blacks = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let x = (n - 1 - i) as f64;
                whites.push(Vertex { id: format!("w{i}_{j}"), pos: [(x + 0.25) / nf, (j as f64 + 0.5) / nf] });
                blacks.push(Vertex { id: format!("b{i}_{j}"), pos: [(x + 0.75) / nf, (j as f64 + 0.3) / nf] });
            }
        }
        let mut specs = Vec::with_capacity(3 * n * n);
        for j in 0..n {
            for i in 0..n {
                let w = idx(i, j);
                specs.push(EdgeSpec::new(w, idx(i, j), -self.a[j][i].ln(), (0, 0)));
                let right = if i + 1 == n { (-1, 0) } else { (0, 0) };
                specs.push(EdgeSpec::new(w, idx((i + 1) % n, j), -self.b[j][i].ln(), right));
                let up = if j + 1 == n { (0, 1) } else { (0, 0) };
                specs.push(EdgeSpec::new(w, idx(i, (j + 1) % n), -self.c[j][i].ln(), up));
            }
        }
        FundamentalDomain::from_parts(whites, blacks, specs)
    }
}

/// Row transfer matrices `T_1(w), ..., T_n(w)`. Row `j` of the lattice
/// carries `T(w)` with diagonal `a_i = a / c` and superdiagonal
/// `b_i = b / c`, the corner `b_n w` closing the row; `T_1` is the top row,
/// so the monodromy `T_1 ... T_n` applies the bottom row first.
#[derive(Clone, Debug, Serialize)]
pub struct TransferChain {
    pub n: usize,
    /// `diagonal[k][i]` is `a_i` of `T_{k+1}`.
    pub diagonal: Vec<Vec<f64>>,
    pub superdiagonal: Vec<Vec<f64>>,
}

pub fn transfer_chain(weights: &HexWeights) -> Result<TransferChain> {
    weights.validate()?;
    let n = weights.n();
    let mut diagonal = Vec::with_capacity(n);
    let mut superdiagonal = Vec::with_capacity(n);
    for j in (0..n).rev() {
        diagonal.push((0..n).map(|i| weights.a[j][i] / weights.c[j][i]).collect());
        superdiagonal.push((0..n).map(|i| weights.b[j][i] / weights.c[j][i]).collect());
    }
    Ok(TransferChain { n, diagonal, superdiagonal })
}

impl TransferChain {
    /// `T_{k+1}(w)`.
    pub fn factor(&self, k: usize, w: Complex64) -> DMatrix<Complex64> {
        let n = self.n;
        let mut t = DMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] += Complex64::from(self.diagonal[k][i]);
            let b = Complex64::from(self.superdiagonal[k][i]);
            if i + 1 < n {
                t[(i, i + 1)] += b;
            } else {
                t[(i, 0)] += b * w;
            }
        }
        t
    }

    pub fn real_factor(&self, k: usize) -> DMatrix<f64> {
        self.factor(k, Complex64::from(1.0)).map(|v| v.re)
    }

    /// `M(w) = T_1(w) ... T_n(w)`.
    pub fn monodromy(&self, w: Complex64) -> DMatrix<Complex64> {
        (0..self.n).fold(DMatrix::identity(self.n, self.n), |acc, k| acc * self.factor(k, w))
    }

    /// `det(z - (-1)^n M(w))`.
    pub fn det(&self, z: Complex64, w: Complex64) -> Complex64 {
        let sign = if self.n % 2 == 0 { 1.0 } else { -1.0 };
        let m = self.monodromy(w) * Complex64::from(sign);
        (DMatrix::identity(self.n, self.n) * z - m).determinant()
    }
}

/// Comparison of `det(z - (-1)^n M(w))` with `P` on a grid of points.
#[derive(Clone, Debug, Serialize)]
pub struct TransferIdentity {
    pub n: usize,
    pub points: usize,
    /// `P(s_z z, s_w w) = constant · z^j w^k · det(z - (-1)^n M(w))`.
    pub signs: (i32, i32),
    pub monomial: (i32, i32),
    pub constant: f64,
    pub max_relative_error: f64,
}

/// Checks `P(±z, ±w) ≡ c z^j w^k det(z - (-1)^n M(w))` at `(n + 2)²`
/// points with moduli in `[1/2, 2]` and generic arguments. `P` carries the
/// sign-pattern normalization, so each of the four substitutions
/// `(z, w) -> (±z, ±w)` is tried and the best one reported. The monomial is
/// read off the lowest exponents of `P`, the constant from the first point.
pub fn transfer_identity(weights: &HexWeights, seed: u64) -> Result<TransferIdentity> {
    let chain = transfer_chain(weights)?;
    let p = characteristic_polynomial(&weights.domain()?)?;
    let ((jmin, _), (kmin, _)) =
        p.exponent_bounds().ok_or_else(|| DimerError::InvalidArgument("zero characteristic polynomial".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = chain.n + 2;
    let points: Vec<(Complex64, Complex64)> = (0..side * side)
        .map(|_| {
            let mut draw =
                || Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
            (draw(), draw())
        })
        .collect();
    let dets: Vec<Complex64> = points.iter().map(|&(z, w)| chain.det(z, w) * z.powi(jmin) * w.powi(kmin)).collect();
    let mut best: Option<TransferIdentity> = None;
    for signs in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
        let q = p.sign_substituted(signs.0, signs.1);
        let constant = q.eval_complex(points[0].0, points[0].1) / dets[0];
        let mut worst = constant.im.abs() / constant.norm();
        for (&(z, w), &d) in points.iter().zip(&dets) {
            let scale: f64 = q.terms().map(|(&(j, k), c)| c.abs() * z.norm().powi(j) * w.norm().powi(k)).sum();
            worst = worst.max((q.eval_complex(z, w) - constant * d).norm() / scale);
        }
        if best.as_ref().is_none_or(|b| worst < b.max_relative_error) {
            best = Some(TransferIdentity {
                n: chain.n,
                points: points.len(),
                signs,
                monomial: (jmin, kmin),
                constant: constant.re,
                max_relative_error: worst,
            });
        }
    }
    Ok(best.expect("four candidates"))
}

/// Outcome of the eigenvalue-pattern check
/// `λ₁ > |λ₂| ≥ |λ₃| > |λ₄| ≥ |λ₅| > ...`.
#[derive(Clone, Debug, Serialize)]
pub struct EigenPattern {
    /// Every odd-size minor of every factor is nonnegative.
    pub applicable: bool,
    /// Eigenvalues of the product as `[re, im]`, by decreasing modulus.
    pub eigenvalues: Vec<[f64; 2]>,
    pub holds: bool,
    /// A required strict inequality is a tie within [`GAP_TOLERANCE`].
    pub degenerate: bool,
    pub violations: Vec<String>,
}

fn odd_minors_nonnegative(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let subsets: Vec<Vec<usize>> = (1u32..1 << n)
        .filter(|s| s.count_ones() % 2 == 1)
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect())
        .collect();
    for rows in &subsets {
        for cols in subsets.iter().filter(|c| c.len() == rows.len()) {
            let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])]);
            if sub.determinant() < -1e-12 * scale.powi(rows.len() as i32) {
                return false;
            }
        }
    }
    true
}

/// Eigenvalue pattern of the product of `factors`, whose odd-size minors
/// must be nonnegative for the pattern to be implied.
pub fn eigenvalue_pattern_of(factors: &[DMatrix<f64>]) -> Result<EigenPattern> {
    let n = factors.first().map_or(0, |f| f.nrows());
    if n == 0 || n > 16 || factors.iter().any(|f| f.nrows() != n || f.ncols() != n) {
        return Err(DimerError::InvalidArgument("need square factors of a common size between 1 and 16".into()));
    }
    let applicable = factors.iter().all(odd_minors_nonnegative);
    let m = factors.iter().fold(DMatrix::identity(n, n), |acc, f| acc * f);
    let mut ev: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    if ev.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(DimerError::NonConvergence("eigenvalue solver".into()));
    }
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let top = ev[0].norm().max(f64::MIN_POSITIVE);
    let real = |v: Complex64| v.im.abs() <= GAP_TOLERANCE * top;
    let mut violations = Vec::new();
    let mut degenerate = false;
    if !(real(ev[0]) && ev[0].re > 0.0) {
        violations.push(format!("leading eigenvalue {} is not real positive", ev[0]));
    }
    // With one-based indices, |λ_{2k-1}| > |λ_{2k}| must be strict, while
    // |λ_{2k}| ≥ |λ_{2k+1}| may be a tie and is between reals when it is not.
    for i in 0..n - 1 {
        let gap = ev[i].norm() - ev[i + 1].norm();
        if i % 2 == 0 {
            if gap.abs() <= GAP_TOLERANCE * top {
                degenerate = true;
            } else if gap < 0.0 {
                violations.push(format!("|λ{}| < |λ{}|", i + 1, i + 2));
            }
        } else if gap > GAP_TOLERANCE * top && (!real(ev[i]) || !real(ev[i + 1])) {
            violations.push(format!("separated pair λ{} = {}, λ{} = {} is not real", i + 1, ev[i], i + 2, ev[i + 1]));
        }
    }
    Ok(EigenPattern {
        applicable,
        eigenvalues: ev.iter().map(|v| [v.re, v.im]).collect(),
        holds: violations.is_empty() && !degenerate,
        degenerate,
        violations,
    })
}

/// Eigenvalue pattern of the monodromy `M(1)` of a chain.
pub fn eigenvalue_pattern_check(chain: &TransferChain) -> Result<EigenPattern> {
    let factors: Vec<DMatrix<f64>> = (0..chain.n).map(|k| chain.real_factor(k)).collect();
    eigenvalue_pattern_of(&factors)
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub x: f64,
    pub y: f64,
    pub roots: usize,
    pub reason: String,
}

/// Maximality report of the 2-to-1 check.
#[derive(Clone, Debug, Serialize)]
pub struct MaximalityReport {
    pub checks: usize,
    pub samples: usize,
    /// Points where the torus carries one real node instead of two roots.
    pub nodes: usize,
    pub violations: Vec<Violation>,
    pub seeds: Vec<u64>,
}

impl MaximalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Root-scan resolutions tried in turn before a point is judged.
const SCAN_SAMPLES: [usize; 3] = [512, 4096, 32768];

/// Verdict at one amoeba point: `None` when the torus carries exactly two
/// conjugate simple roots or one real node.
fn judge_point(p: &FloatPoly, x: f64, y: f64) -> (usize, bool, Option<String>) {
    let mut last = (0, false, Some("no roots found on the torus".to_string()));
    for samples in SCAN_SAMPLES {
        let roots = torus_roots_with(p, x, y, samples);
        let count = roots.len();
        if roots.has_node() {
            let reason = (count != 1).then(|| format!("real node together with {} other roots", count - 1));
            return (count, true, reason);
        }
        last = match count {
            2 => {
                let (r, s) = (&roots.roots[0], &roots.roots[1]);
                let gap = (r.z - s.z.conj()).norm() + (r.w - s.w.conj()).norm();
                let reason = (gap > 1e-6).then(|| format!("roots are not conjugate (gap {gap:.2e})"));
                (2, false, reason)
            }
            c if c > 2 => return (c, false, Some(format!("{c} roots on the torus"))),
            c => (c, false, Some(format!("{c} roots on the torus"))),
        };
        if last.2.is_none() {
            return last;
        }
    }
    last
}

/// Checks at `samples` random points of the amoeba that the torus over
/// each carries exactly two conjugate simple roots of `P`, or one real node.
///
/// Points are drawn on the curve itself: a random `w` with `log |w|` in the
/// amoeba window and a random `z`-root of `P(·, w)` give a point
/// `(log |z|, log |w|)` of the amoeba. Draws whose roots lie within `1e-3`
/// of the real locus are redrawn, since they sit on the amoeba boundary.
pub fn two_to_one_check(p: &FloatPoly, samples: usize, seed: u64) -> Result<MaximalityReport> {
    let window = suggest_window(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples);
    let mut attempts = 0;
    while points.len() < samples {
        attempts += 1;
        if attempts > 1000 * samples.max(1) {
            return Err(DimerError::NonConvergence("could not draw interior amoeba points".into()));
        }
        let y = rng.random_range(window.ymin..window.ymax);
        let w = Complex64::from_polar(y.exp(), rng.random_range(0.0..std::f64::consts::TAU));
        let (_, coeffs) = p.z_slice(w);
        let zs = crate::poly::poly_roots(&coeffs);
        if zs.is_empty() {
            continue;
        }
        let z = zs[rng.random_range(0..zs.len())];
        let near_real = |v: Complex64| (v.arg().sin()).abs() < 1e-3;
        if !z.norm().is_finite() || z.norm() == 0.0 || near_real(z) || near_real(w) {
            continue;
        }
        points.push((z.norm().ln(), y));
    }
    let mut violations = Vec::new();
    let mut nodes = 0;
    for &(x, y) in &points {
        let (roots, node, reason) = judge_point(p, x, y);
        nodes += usize::from(node && reason.is_none());
        if let Some(reason) = reason {
            violations.push(Violation { x, y, roots, reason });
        }
    }
    Ok(MaximalityReport { checks: points.len(), samples, nodes, violations, seeds: vec![seed] })
}

/// The 2-to-1 verdict at a single point, e.g. a real node.
pub fn two_to_one_at(p: &FloatPoly, x: f64, y: f64) -> MaximalityReport {
    let (roots, node, reason) = judge_point(p, x, y);
    let violations = reason.map(|reason| Violation { x, y, roots, reason }).into_iter().collect();
    MaximalityReport { checks: 1, samples: 1, nodes: usize::from(node), violations, seeds: Vec::new() }
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaCheck {
    pub estimate: AreaEstimate,
    /// `π² · Area(N(P))`.
    pub expected: f64,
    pub relative_gap: f64,
}

/// Monte-Carlo amoeba area on an `m x m` stratified raster of twice the
/// suggested window, against `π²` times the Newton polygon area.
pub fn area_check(p: &FloatPoly, m: usize, seed: u64) -> AreaCheck {
    let expected = std::f64::consts::PI.powi(2) * newton_polygon(p).area();
    let estimate = amoeba_area(p, suggest_window(p).scaled(2.0), m, seed);
    let relative_gap = (estimate.area - expected).abs() / expected;
    AreaCheck { estimate, expected, relative_gap }
}
