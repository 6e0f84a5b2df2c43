//! Kasteleyn signs, the magnetic Kasteleyn matrix `K(z, w)`, the
//! characteristic polynomial `P(z, w) = det K(z, w)` and torus partition
//! functions.
//!
//! Entry rule: an edge with offset `(dx, dy)` contributes
//! `sign * weight * z^dy * w^-dx`, so the exponent of a matching's term is its
//! height change. `P` is normalized by the monomial that puts the reference
//! matching at exponent `(0, 0)`, and the signs are chosen so that the
//! coefficient at `(j, k)` has sign `(-1)^(jk + j + k)`.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DimerError, Result};
use crate::lattice::{FundamentalDomain, TorusGraph};
use crate::linalg::DenseMatrix;
use crate::poly::LaurentPoly2;
use crate::scalar::{real_sign, Rational, Scalar};
use crate::{ExactPoly, FloatPoly};

/// Default relative residual allowed when interpolating in floating point.
pub const DEFAULT_INTERPOLATION_TOLERANCE: f64 = 1e-8;

/// Edge signs of a Kasteleyn weighting together with the spin-structure
/// twist that was applied to satisfy the torus sign pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KasteleynSigns {
    pub signs: Vec<i8>,
    /// `(theta, tau)`: edges were multiplied by `(-1)^(theta*dy + tau*dx)`.
    pub twist: (u8, u8),
}

impl KasteleynSigns {
    /// Checks the face condition: an odd number of minus signs around faces of
    /// degree `0 mod 4`, even around faces of degree `2 mod 4`.
    pub fn satisfies_face_condition(&self, domain: &FundamentalDomain) -> bool {
        domain.faces.iter().all(|f| {
            let minus = f.darts.iter().filter(|&&d| self.signs[d / 2] < 0).count();
            minus % 2 == face_target(f.degree())
        })
    }
}

fn face_target(degree: usize) -> usize {
    usize::from(degree % 4 == 0)
}

/// Solves the face parity system over GF(2); free variables are set to `+`.
fn solve_face_parities(domain: &FundamentalDomain) -> Result<Vec<i8>> {
    let ne = domain.edges.len();
    let words = ne.div_ceil(64) + 1;
    let rhs_bit = ne;
    let mut rows: Vec<Vec<u64>> = domain
        .faces
        .iter()
        .map(|f| {
            let mut row = vec![0u64; words];
            for &d in &f.darts {
                let e = d / 2;
                row[e / 64] ^= 1 << (e % 64);
            }
            if face_target(f.degree()) == 1 {
                row[rhs_bit / 64] ^= 1 << (rhs_bit % 64);
            }
            row
        })
        .collect();
    let bit = |row: &Vec<u64>, i: usize| (row[i / 64] >> (i % 64)) & 1 == 1;
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ne {
        let Some(p) = (r..rows.len()).find(|&i| bit(&rows[i], col)) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && bit(&rows[i], col) {
                let src = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(&src) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| bit(row, rhs_bit)) {
        return Err(DimerError::SignAssignment("face parity system is inconsistent".into()));
    }
    let mut signs = vec![1i8; ne];
    for (i, &col) in pivots.iter().enumerate() {
        if bit(&rows[i], rhs_bit) {
            signs[col] = -1;
        }
    }
    Ok(signs)
}

/// `(-1)^(jk + j + k)`: `+1` exactly when `j` and `k` are both even.
pub fn pattern_sign(j: i32, k: i32) -> i32 {
    if j.rem_euclid(2) == 0 && k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// True if every coefficient carries the sign `(-1)^(jk + j + k)`.
pub fn sign_pattern_holds<T: Scalar>(p: &LaurentPoly2<T>) -> bool {
    p.terms().all(|(&(j, k), c)| real_sign(c) == pattern_sign(j, k))
}

/// The magnetically altered Kasteleyn matrix of a fundamental domain.
#[derive(Clone, Debug)]
pub struct MagneticKasteleyn<'a> {
    pub domain: &'a FundamentalDomain,
    pub signs: KasteleynSigns,
    /// Exponent of the reference matching's term in `det K`.
    reference_exponent: (i32, i32),
}

fn weight_of<T: Scalar>(domain: &FundamentalDomain, e: usize) -> Result<T> {
    let edge = &domain.edges[e];
    T::from_weight(edge.weight, edge.exact_weight.as_ref()).ok_or_else(|| {
        DimerError::InvalidArgument(format!("edge {e} has no exact weight; exact arithmetic needs rational weights"))
    })
}

fn matrix_from_signs<T: Scalar>(domain: &FundamentalDomain, signs: &[i8], z: &T, w: &T) -> Result<DenseMatrix<T>> {
    let mut k: DenseMatrix<T> = DenseMatrix::zeros(domain.size());
    for (e, edge) in domain.edges.iter().enumerate() {
        let mut v = weight_of::<T>(domain, e)? * z.powi(edge.offset.1) * w.powi(-edge.offset.0);
        if signs[e] < 0 {
            v = -v;
        }
        let cell = &mut k[(edge.white, edge.black)];
        *cell = cell.clone() + v;
    }
    Ok(k)
}

fn reference_exponent(domain: &FundamentalDomain) -> (i32, i32) {
    domain.reference_matching().iter().fold((0, 0), |acc, &e| {
        let h = domain.edges[e].height_vector();
        (acc.0 + h.0, acc.1 + h.1)
    })
}

/// Exponent bounds `((jmin, jmax), (kmin, kmax))` of the normalized
/// polynomial, from the extreme offsets at each white vertex.
fn exponent_bounds(domain: &FundamentalDomain, reference: (i32, i32)) -> ((i32, i32), (i32, i32)) {
    let (mut jlo, mut jhi, mut klo, mut khi) = (0, 0, 0, 0);
    for w in 0..domain.size() {
        let hs: Vec<(i32, i32)> = domain.white_edges(w).iter().map(|&e| domain.edges[e].height_vector()).collect();
        jlo += hs.iter().map(|h| h.0).min().unwrap_or(0);
        jhi += hs.iter().map(|h| h.0).max().unwrap_or(0);
        klo += hs.iter().map(|h| h.1).min().unwrap_or(0);
        khi += hs.iter().map(|h| h.1).max().unwrap_or(0);
    }
    ((jlo - reference.0, jhi - reference.0), (klo - reference.1, khi - reference.1))
}

/// Float interpolation of `z^-a w^-b det K` by an inverse DFT on the unit
/// torus, followed by a residual check at random points.
fn interpolate_float(
    domain: &FundamentalDomain,
    signs: &[i8],
    reference: (i32, i32),
    tolerance: f64,
) -> Result<FloatPoly> {
    let ((jlo, jhi), (klo, khi)) = exponent_bounds(domain, reference);
    let nz = (jhi - jlo + 1) as usize;
    let nw = (khi - klo + 1) as usize;
    let tau = 2.0 * std::f64::consts::PI;
    let eval = |z: Complex64, w: Complex64| -> Result<Complex64> {
        let det = matrix_from_signs::<Complex64>(domain, signs, &z, &w)?.det();
        Ok(det * z.powi(-reference.0) * w.powi(-reference.1))
    };
    let mut values = vec![Complex64::zero(); nz * nw];
    for a in 0..nz {
        for b in 0..nw {
            let z = Complex64::from_polar(1.0, tau * a as f64 / nz as f64);
            let w = Complex64::from_polar(1.0, tau * b as f64 / nw as f64);
            values[a * nw + b] = eval(z, w)?;
        }
    }
    let mut p = FloatPoly::zero();
    let mut scale = 0.0f64;
    let mut coeffs = Vec::with_capacity(nz * nw);
    for q in 0..nz {
        for r in 0..nw {
            let j = jlo + q as i32;
            let k = klo + r as i32;
            let mut acc = Complex64::zero();
            for a in 0..nz {
                for b in 0..nw {
                    let phase = -tau * ((a as i64 * j as i64) as f64 / nz as f64 + (b as i64 * k as i64) as f64 / nw as f64);
                    acc += values[a * nw + b] * Complex64::from_polar(1.0, phase);
                }
            }
            acc /= (nz * nw) as f64;
            scale = scale.max(acc.norm());
            coeffs.push(((j, k), acc));
        }
    }
    for ((j, k), c) in coeffs {
        if c.norm() > 1e-12 * scale {
            p.add_term(j, k, c.re);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut residual = 0.0f64;
    for _ in 0..6 {
        let z = Complex64::from_polar(rng.random_range(0.6..1.6), rng.random_range(0.0..tau));
        let w = Complex64::from_polar(rng.random_range(0.6..1.6), rng.random_range(0.0..tau));
        let direct = eval(z, w)?;
        let size: f64 = p.terms().map(|(&(j, k), c)| c.abs() * z.norm().powi(j) * w.norm().powi(k)).sum();
        residual = residual.max((direct - p.eval_complex(z, w)).norm() / size.max(f64::MIN_POSITIVE));
    }
    if residual > tolerance || !residual.is_finite() {
        return Err(DimerError::IllConditioned { residual, tolerance });
    }
    Ok(p)
}

/// Coefficients of the polynomial through `(xs[i], ys[i])` by divided
/// differences, lowest degree first.
fn newton_interpolate<T: Scalar>(xs: &[T], ys: &[T]) -> Vec<T> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i].clone() - dd[i - 1].clone()) / (xs[i].clone() - xs[i - level].clone());
        }
    }
    let mut coeffs = vec![T::zero(); n];
    for i in (0..n).rev() {
        // coeffs <- coeffs * (x - xs[i]) + dd[i]
        let mut next = vec![T::zero(); n];
        for d in 0..n {
            if coeffs[d].is_zero() {
                continue;
            }
            if d + 1 < n {
                next[d + 1] = next[d + 1].clone() + coeffs[d].clone();
            }
            next[d] = next[d].clone() - coeffs[d].clone() * xs[i].clone();
        }
        next[0] = next[0].clone() + dd[i].clone();
        coeffs = next;
    }
    coeffs
}

fn interpolate_exact(domain: &FundamentalDomain, signs: &[i8], reference: (i32, i32)) -> Result<ExactPoly> {
    let ((jlo, jhi), (klo, khi)) = exponent_bounds(domain, reference);
    let nz = (jhi - jlo + 1) as usize;
    let nw = (khi - klo + 1) as usize;
    let zs: Vec<Rational> = (1..=nz as i64).map(Rational::from_i64).collect();
    let ws: Vec<Rational> = (1..=nw as i64).map(Rational::from_i64).collect();
    let mut by_z: Vec<Vec<Rational>> = Vec::with_capacity(nz);
    for z in &zs {
        let mut vals = Vec::with_capacity(nw);
        for w in &ws {
            let det = matrix_from_signs::<Rational>(domain, signs, z, w)?.det();
            vals.push(det * z.powi(-reference.0 - jlo) * w.powi(-reference.1 - klo));
        }
        by_z.push(newton_interpolate(&ws, &vals));
    }
    let mut p = ExactPoly::zero();
    for r in 0..nw {
        let column: Vec<Rational> = by_z.iter().map(|c| c[r].clone()).collect();
        for (q, c) in newton_interpolate(&zs, &column).into_iter().enumerate() {
            p.add_term(jlo + q as i32, klo + r as i32, c);
        }
    }
    Ok(p)
}

/// Kasteleyn signs for a domain: a solution of the face conditions, twisted
/// and globally flipped so that the normalized polynomial has the torus sign
/// pattern with a positive reference coefficient.
pub fn kasteleyn_signs(domain: &FundamentalDomain) -> Result<KasteleynSigns> {
    let raw = solve_face_parities(domain)?;
    let reference = reference_exponent(domain);
    let p = interpolate_float(domain, &raw, reference, 1e-6)?.pruned(1e-9);
    for (theta, tau) in [(0u8, 0u8), (1, 1), (1, 0), (0, 1)] {
        let q = p.sign_substituted(if theta == 1 { -1 } else { 1 }, if tau == 1 { -1 } else { 1 });
        let flip = q.coeff(0, 0) < 0.0;
        let q = if flip { q.scaled(&-1.0) } else { q };
        if !sign_pattern_holds(&q) {
            continue;
        }
        let mut signs = raw.clone();
        for (e, edge) in domain.edges.iter().enumerate() {
            let parity = (theta as i32 * edge.offset.1 + tau as i32 * edge.offset.0).rem_euclid(2);
            if parity == 1 {
                signs[e] = -signs[e];
            }
        }
        let factor = twist_factor(reference, theta, tau);
        if flip ^ (factor < 0) {
            for &e in domain.white_edges(0) {
                signs[e] = -signs[e];
            }
        }
        return Ok(KasteleynSigns { signs, twist: (theta, tau) });
    }
    Err(DimerError::SignAssignment("no spin structure yields the torus sign pattern".into()))
}

/// Sign picked up by the normalizing monomial when `(z, w)` is replaced by
/// `((-1)^theta z, (-1)^tau w)`.
fn twist_factor(reference: (i32, i32), theta: u8, tau: u8) -> i32 {
    let parity = (theta as i32 * reference.0 + tau as i32 * reference.1).rem_euclid(2);
    if parity == 1 {
        -1
    } else {
        1
    }
}

impl<'a> MagneticKasteleyn<'a> {
    pub fn new(domain: &'a FundamentalDomain) -> Result<Self> {
        let signs = kasteleyn_signs(domain)?;
        Ok(Self { domain, signs, reference_exponent: reference_exponent(domain) })
    }

    pub fn with_signs(domain: &'a FundamentalDomain, signs: KasteleynSigns) -> Self {
        Self { domain, signs, reference_exponent: reference_exponent(domain) }
    }

    pub fn reference_exponent(&self) -> (i32, i32) {
        self.reference_exponent
    }

    /// `K(z, w)` with rows indexed by whites and columns by blacks.
    pub fn eval<T: Scalar>(&self, z: &T, w: &T) -> Result<DenseMatrix<T>> {
        if z.is_zero() || w.is_zero() {
            return Err(DimerError::InvalidArgument("K(z, w) needs nonzero z and w".into()));
        }
        matrix_from_signs(self.domain, &self.signs.signs, z, w)
    }

    /// Signed edge weight `K(w, b)` of a single edge at `(z, w) = (1, 1)`.
    pub fn edge_entry<T: Scalar>(&self, e: usize) -> Result<T> {
        let v = weight_of::<T>(self.domain, e)?;
        Ok(if self.signs.signs[e] < 0 { -v } else { v })
    }

    /// Normalized `P(z, w) = z^-a w^-b det K(z, w)`.
    pub fn normalized_det<T: Scalar>(&self, z: &T, w: &T) -> Result<T> {
        let (a, b) = self.reference_exponent;
        Ok(self.eval(z, w)?.det() * z.powi(-a) * w.powi(-b))
    }

    /// Kasteleyn matrix of the torus `G_n` with lifted signs; wraps around the
    /// torus carry the `z`, `w` powers.
    pub fn torus_matrix<T: Scalar>(&self, torus: &TorusGraph, z: &T, w: &T) -> Result<DenseMatrix<T>> {
        if z.is_zero() || w.is_zero() {
            return Err(DimerError::InvalidArgument("K(z, w) needs nonzero z and w".into()));
        }
        let weights: Vec<T> =
            (0..self.domain.edges.len()).map(|e| self.edge_entry::<T>(e)).collect::<Result<_>>()?;
        let mut k: DenseMatrix<T> = DenseMatrix::zeros(torus.num_whites());
        for inst in torus.edges() {
            let v = weights[inst.base].clone() * z.powi(inst.wrap.1) * w.powi(-inst.wrap.0);
            let cell = &mut k[(inst.white, inst.black)];
            *cell = cell.clone() + v;
        }
        Ok(k)
    }

    /// Contribution of a single torus edge instance to its entry of
    /// `torus_matrix`; parallel edges share an entry.
    pub fn torus_edge_entry<T: Scalar>(&self, torus: &TorusGraph, e: usize, z: &T, w: &T) -> Result<T> {
        let inst = torus.edge(e);
        Ok(self.edge_entry::<T>(inst.base)? * z.powi(inst.wrap.1) * w.powi(-inst.wrap.0))
    }

    /// Normalized `P_n(z, w)` from the explicit `G_n` determinant: the sign
    /// and monomial are those that put the periodic reference matching at
    /// exponent `(0, 0)` with coefficient sign `+`.
    pub fn torus_normalized_det<T: Scalar>(&self, torus: &TorusGraph, z: &T, w: &T) -> Result<T> {
        Ok(self.torus_matrix(torus, z, w)?.det() * self.torus_normalization(torus, z, w))
    }

    /// Factor `± z^-a w^-b` that turns `det K_n(z, w)` into the normalized
    /// `P_n(z, w)`.
    pub fn torus_normalization<T: Scalar>(&self, torus: &TorusGraph, z: &T, w: &T) -> T {
        let reference = torus.reference_matching();
        let mut a = 0;
        let mut b = 0;
        let mut sign = permutation_sign(
            &reference.by_white.iter().map(|&e| torus.edge(e).black).collect::<Vec<_>>(),
        );
        for &e in &reference.by_white {
            let inst = torus.edge(e);
            a += inst.wrap.1;
            b -= inst.wrap.0;
            sign *= self.signs.signs[inst.base] as i32;
        }
        let factor = z.powi(-a) * w.powi(-b);
        if sign < 0 {
            -factor
        } else {
            factor
        }
    }
}

/// Parity of a permutation given as `perm[i]`.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// `K(z, w)` evaluated at complex arguments.
pub fn kasteleyn_eval(k: &MagneticKasteleyn<'_>, z: Complex64, w: Complex64) -> Result<DenseMatrix<Complex64>> {
    k.eval(&z, &w)
}

/// The characteristic polynomial with exact coefficients when all weights are
/// rational, and always in floating point.
#[derive(Clone, Debug)]
pub struct SpectralPolynomial {
    pub float: FloatPoly,
    pub exact: Option<ExactPoly>,
}

impl SpectralPolynomial {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// Float characteristic polynomial with the default residual tolerance.
pub fn characteristic_polynomial(domain: &FundamentalDomain) -> Result<FloatPoly> {
    characteristic_polynomial_with_tolerance(domain, DEFAULT_INTERPOLATION_TOLERANCE)
}

pub fn characteristic_polynomial_with_tolerance(domain: &FundamentalDomain, tolerance: f64) -> Result<FloatPoly> {
    let k = MagneticKasteleyn::new(domain)?;
    interpolate_float(domain, &k.signs.signs, k.reference_exponent, tolerance)
}

/// Exact characteristic polynomial; fails unless every weight is rational.
pub fn characteristic_polynomial_exact(domain: &FundamentalDomain) -> Result<ExactPoly> {
    let k = MagneticKasteleyn::new(domain)?;
    interpolate_exact(domain, &k.signs.signs, k.reference_exponent)
}

pub fn spectral_polynomial(domain: &FundamentalDomain) -> Result<SpectralPolynomial> {
    let k = MagneticKasteleyn::new(domain)?;
    let float = interpolate_float(domain, &k.signs.signs, k.reference_exponent, DEFAULT_INTERPOLATION_TOLERANCE)?;
    let exact = if domain.has_exact_weights() {
        Some(interpolate_exact(domain, &k.signs.signs, k.reference_exponent)?)
    } else {
        None
    };
    Ok(SpectralPolynomial { float, exact })
}

/// Representative of `P` under `(z, w) -> (±z, ±w)`, overall sign and
/// monomial shifts that has the torus sign pattern with a positive constant
/// term. The constant term is kept when present; otherwise the first support
/// point that admits the pattern is moved to the origin.
pub fn normalize_sign_convention<T: Scalar>(p: &LaurentPoly2<T>) -> Result<LaurentPoly2<T>> {
    let mut shifts = Vec::new();
    if !p.coeff(0, 0).is_zero() {
        shifts.push((0, 0));
    }
    shifts.extend(p.support().into_iter().filter(|&s| s != (0, 0)));
    for (sj, sk) in shifts {
        let shifted = p.shifted(-sj, -sk);
        for (sz, sw) in [(1, 1), (-1, -1), (-1, 1), (1, -1)] {
            let q = shifted.sign_substituted(sz, sw);
            let q = if real_sign(&q.coeff(0, 0)) < 0 { q.scaled(&-T::one()) } else { q };
            if sign_pattern_holds(&q) {
                return Ok(q);
            }
        }
    }
    Err(DimerError::SignAssignment("no representative has the torus sign pattern".into()))
}

/// `P_n(z, w)`: product of `P` over all `n`-th roots of `z` and `w`.
pub fn poly_enlarged(p: &FloatPoly, n: usize, z: Complex64, w: Complex64) -> Complex64 {
    log_poly_enlarged(p, n, z, w).exp()
}

/// Sum of complex logarithms of the factors of `P_n(z, w)`. The imaginary
/// part tracks the phase of the product without overflow.
pub fn log_poly_enlarged(p: &FloatPoly, n: usize, z: Complex64, w: Complex64) -> Complex64 {
    let roots = |x: Complex64| -> Vec<Complex64> {
        let base = x.powf(1.0 / n as f64);
        (0..n).map(|k| base * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect()
    };
    let zs = roots(z);
    let ws = roots(w);
    let mut acc = Complex64::zero();
    for z0 in &zs {
        for w0 in &ws {
            acc += p.eval_complex(*z0, *w0).ln();
        }
    }
    acc
}

/// Partition function of `G_n` from the four signed determinants
/// `½(-P_n(1,1) + P_n(1,-1) + P_n(-1,1) + P_n(-1,-1))`, built on the explicit
/// torus graph. Exact for rational scalars.
pub fn partition_function_torus<T: Scalar>(domain: &FundamentalDomain, n: usize) -> Result<T> {
    let k = MagneticKasteleyn::new(domain)?;
    let torus = domain.torus(n)?;
    let terms = torus_four_terms::<T>(&k, &torus)?;
    let z = (-terms[0].clone() + terms[1].clone() + terms[2].clone() + terms[3].clone()) / T::from_i64(2);
    if real_sign(&z) <= 0 {
        return Err(DimerError::SignAssignment(format!("torus partition function is not positive: {z:?}")));
    }
    Ok(z)
}

/// `[P_n(1,1), P_n(1,-1), P_n(-1,1), P_n(-1,-1)]` from the `G_n` determinant.
pub fn torus_four_terms<T: Scalar>(k: &MagneticKasteleyn<'_>, torus: &TorusGraph) -> Result<[T; 4]> {
    let one = T::one();
    let m = -T::one();
    Ok([
        k.torus_normalized_det(torus, &one, &one)?,
        k.torus_normalized_det(torus, &one, &m)?,
        k.torus_normalized_det(torus, &m, &one)?,
        k.torus_normalized_det(torus, &m, &m)?,
    ])
}

/// `log Z(G_n)` through the product formula, usable for large `n`.
pub fn log_partition_function_torus(p: &FloatPoly, n: usize) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let points = [(one, one), (one, -one), (-one, one), (-one, -one)];
    let coeffs = [-0.5, 0.5, 0.5, 0.5];
    let logs: Vec<Complex64> = points.iter().map(|&(z, w)| log_poly_enlarged(p, n, z, w)).collect();
    let top = logs.iter().map(|l| l.re).filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(DimerError::SignAssignment("all four torus determinants vanish".into()));
    }
    let mut total = 0.0;
    for (l, c) in logs.iter().zip(coeffs) {
        if l.re.is_finite() {
            // Each P_n(±1, ±1) is real; its sign is the phase cos(Im log).
            total += c * (l.re - top).exp() * l.im.cos().signum();
        }
    }
    if total <= 0.0 {
        return Err(DimerError::SignAssignment(format!("torus partition function is not positive (n = {n})")));
    }
    Ok(top + total.ln())
}

/// `log Z` per fundamental domain, as the Ronkin function at the origin.
pub fn log_z_per_domain(p: &FloatPoly, tolerance: f64) -> Result<f64> {
    crate::amoeba::ronkin_with_tolerance(p, 0.0, 0.0, tolerance).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_interpolation_recovers_cubic() {
        let xs: Vec<Rational> = (1..=4).map(Rational::from_i64).collect();
        let f = |x: &Rational| x.clone() * x.clone() * x.clone() - Rational::from_i64(2) * x.clone() + Rational::from_i64(7);
        let ys: Vec<Rational> = xs.iter().map(f).collect();
        let c = newton_interpolate(&xs, &ys);
        assert_eq!(c, vec![Rational::from_i64(7), Rational::from_i64(-2), Rational::from_i64(0), Rational::from_i64(1)]);
    }

    #[test]
    fn normalization_examples() {
        let r = Rational::from_i64;
        let displayed = ExactPoly::from_terms([((0, 0), r(5)), ((1, 0), r(1)), ((-1, 0), r(1)), ((0, 1), r(1)), ((0, -1), r(1))]);
        let canon = normalize_sign_convention(&displayed).unwrap();
        assert_eq!(canon.to_string(), "5 - z - 1/z - w - 1/w");
        assert_eq!(normalize_sign_convention(&canon).unwrap(), canon);
        let node = ExactPoly::from_terms([((0, 0), r(4)), ((1, 0), r(1)), ((-1, 0), r(1)), ((0, 1), r(1)), ((0, -1), r(1))]);
        assert_eq!(normalize_sign_convention(&node).unwrap().to_string(), "4 - z - 1/z - w - 1/w");
    }

    #[test]
    fn permutation_parity() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    }
}
