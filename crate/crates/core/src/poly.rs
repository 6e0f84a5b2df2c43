//! Bivariate Laurent polynomials and univariate complex root finding.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{DimerError, Result};
use crate::scalar::{parse_rational, real_sign, Rational, Scalar};

/// Finitely supported sum of `c_{jk} z^j w^k`. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly2<T> {
    terms: BTreeMap<(i32, i32), T>,
}

impl<T: Scalar> Default for LaurentPoly2<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> LaurentPoly2<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn monomial(j: i32, k: i32, c: T) -> Self {
        let mut p = Self::zero();
        p.add_term(j, k, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((i32, i32), T)>) -> Self {
        let mut p = Self::zero();
        for ((j, k), c) in terms {
            p.add_term(j, k, c);
        }
        p
    }

    pub fn add_term(&mut self, j: i32, k: i32, c: T) {
        let entry = self.terms.entry((j, k)).or_insert_with(T::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&(j, k));
        }
    }

    pub fn coeff(&self, j: i32, k: i32) -> T {
        self.terms.get(&(j, k)).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &T)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<(i32, i32)> {
        self.terms.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops float coefficients below `tol` times the largest magnitude.
    pub fn pruned(&self, tol: f64) -> Self {
        let scale = self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max);
        Self::from_terms(self.terms.iter().filter(|(_, c)| c.magnitude() > tol * scale).map(|(&e, c)| (e, c.clone())))
    }

    pub fn eval(&self, z: &T, w: &T) -> T {
        self.terms
            .iter()
            .fold(T::zero(), |acc, (&(j, k), c)| acc + c.clone() * z.powi(j) * w.powi(k))
    }

    pub fn eval_complex(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(j, k), c)| c.to_complex() * z.powi(j) * w.powi(k))
            .sum()
    }

    /// `(P, z ∂P/∂z, w ∂P/∂w)` at a complex point.
    pub fn eval_with_log_partials(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut pz = Complex64::zero();
        let mut pw = Complex64::zero();
        for (&(j, k), c) in &self.terms {
            let t = c.to_complex() * z.powi(j) * w.powi(k);
            p += t;
            pz += t * j as f64;
            pw += t * k as f64;
        }
        (p, pz, pw)
    }

    /// `(∂P/∂z, ∂P/∂w)` at a complex point.
    pub fn partials(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
        let (_, zp, wp) = self.eval_with_log_partials(z, w);
        (zp / z, wp / w)
    }

    /// Multiplies by `z^dj w^dk`.
    pub fn shifted(&self, dj: i32, dk: i32) -> Self {
        Self { terms: self.terms.iter().map(|(&(j, k), c)| ((j + dj, k + dk), c.clone())).collect() }
    }

    /// Substitutes `(z, w) -> (sz z, sw w)` with `sz, sw ∈ {+1, -1}`.
    pub fn sign_substituted(&self, sz: i32, sw: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(j, k), c)| {
                    let flip = (sz < 0 && j.rem_euclid(2) == 1) ^ (sw < 0 && k.rem_euclid(2) == 1);
                    ((j, k), if flip { -c.clone() } else { c.clone() })
                })
                .collect(),
        }
    }

    pub fn scaled(&self, s: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(&e, c)| (e, c.clone() * s.clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            for (&(d, e), f) in &other.terms {
                out.add_term(a + d, b + e, c.clone() * f.clone());
            }
        }
        out
    }

    /// Same polynomial with `f64` coefficients.
    pub fn to_f64(&self) -> LaurentPoly2<f64> {
        LaurentPoly2 { terms: self.terms.iter().map(|(&e, c)| (e, c.to_complex().re)).collect() }
    }

    /// Coefficients after `(z, w) -> (e^bx z, e^by w)`.
    pub fn magnetic(&self, bx: f64, by: f64) -> LaurentPoly2<f64> {
        LaurentPoly2 {
            terms: self
                .terms
                .iter()
                .map(|(&(j, k), c)| ((j, k), c.to_complex().re * (j as f64 * bx + k as f64 * by).exp()))
                .collect(),
        }
    }

    pub fn exponent_bounds(&self) -> Option<((i32, i32), (i32, i32))> {
        let mut it = self.terms.keys();
        let &(j0, k0) = it.next()?;
        let mut b = ((j0, j0), (k0, k0));
        for &(j, k) in it {
            b.0 .0 = b.0 .0.min(j);
            b.0 .1 = b.0 .1.max(j);
            b.1 .0 = b.1 .0.min(k);
            b.1 .1 = b.1 .1.max(k);
        }
        Some(b)
    }

    /// Coefficients of the one-variable slice `z -> P(z, w)` as
    /// `(lowest z exponent, [a_jmin, ..., a_jmax])`.
    pub fn z_slice(&self, w: Complex64) -> (i32, Vec<Complex64>) {
        let Some(((jmin, jmax), _)) = self.exponent_bounds() else {
            return (0, Vec::new());
        };
        let mut a = vec![Complex64::zero(); (jmax - jmin + 1) as usize];
        for (&(j, k), c) in &self.terms {
            a[(j - jmin) as usize] += c.to_complex() * w.powi(k);
        }
        (jmin, a)
    }

    /// Swaps the roles of `z` and `w`.
    pub fn transposed(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&(j, k), c)| ((k, j), c.clone())).collect() }
    }
}

/// Ordering used for display: constant first, then by total degree, z before w,
/// positive powers before negative ones.
fn display_key(&(j, k): &(i32, i32)) -> (i32, i32, i32, i32) {
    (j.abs() + k.abs(), k.abs(), -j, -k)
}

fn var_power(name: &str, e: i32) -> String {
    match e.abs() {
        1 => name.to_string(),
        a => format!("{name}^{a}"),
    }
}

fn monomial_text(j: i32, k: i32) -> String {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (name, e) in [("z", j), ("w", k)] {
        if e > 0 {
            num.push(var_power(name, e));
        } else if e < 0 {
            den.push(var_power(name, e));
        }
    }
    let num_text = if num.is_empty() { "1".to_string() } else { num.join("*") };
    match den.len() {
        0 => num_text,
        1 => format!("{num_text}/{}", den[0]),
        _ => format!("{num_text}/({})", den.join("*")),
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for LaurentPoly2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(display_key);
        for (idx, &(j, k)) in keys.iter().enumerate() {
            let c = &self.terms[&(j, k)];
            let negative = real_sign(c) < 0;
            let abs = if negative { -c.clone() } else { c.clone() };
            let sign = match (idx, negative) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            let is_one = abs == T::one();
            let body = if (j, k) == (0, 0) {
                format!("{abs}")
            } else if is_one {
                monomial_text(j, k)
            } else {
                let m = monomial_text(j, k);
                if let Some(rest) = m.strip_prefix("1/") {
                    format!("{abs}/{rest}")
                } else {
                    format!("{abs}*{m}")
                }
            };
            write!(f, "{sign}{body}")?;
        }
        Ok(())
    }
}

fn bigint_json(x: &num_bigint::BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn json_int_text(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => n.as_i64().map(|i| i.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Serializes exact coefficients as numerator/denominator pairs.
pub fn exact_to_json(p: &LaurentPoly2<Rational>) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(&(j, k), c)| json!({"j": j, "k": k, "coeff_num": bigint_json(c.numer()), "coeff_den": bigint_json(c.denom())}))
        .collect();
    json!({"schema": 1, "terms": terms})
}

pub fn float_to_json(p: &LaurentPoly2<f64>) -> Value {
    let terms: Vec<Value> = p.terms().map(|(&(j, k), c)| json!({"j": j, "k": k, "coeff": c})).collect();
    json!({"schema": 1, "terms": terms})
}

fn term_exponents(t: &Value) -> Result<(i32, i32)> {
    let get = |key: &str| {
        t.get(key)
            .and_then(Value::as_i64)
            .and_then(|v| i32::try_from(v).ok())
            .ok_or_else(|| DimerError::Schema(format!("term missing integer field '{key}'")))
    };
    Ok((get("j")?, get("k")?))
}

fn terms_array(v: &Value) -> Result<&Vec<Value>> {
    v.get("terms").and_then(Value::as_array).ok_or_else(|| DimerError::Schema("missing 'terms' array".into()))
}

pub fn exact_from_json(v: &Value) -> Result<LaurentPoly2<Rational>> {
    let mut p = LaurentPoly2::zero();
    for t in terms_array(v)? {
        let (j, k) = term_exponents(t)?;
        let num = t.get("coeff_num").and_then(json_int_text);
        let den = t.get("coeff_den").and_then(json_int_text).unwrap_or_else(|| "1".into());
        let c = num
            .and_then(|n| parse_rational(&format!("{n}/{den}")))
            .ok_or_else(|| DimerError::Schema("term needs integer 'coeff_num' and nonzero 'coeff_den'".into()))?;
        p.add_term(j, k, c);
    }
    Ok(p)
}

/// Reads float coefficients, accepting either `coeff` or a numerator/denominator pair.
pub fn float_from_json(v: &Value) -> Result<LaurentPoly2<f64>> {
    let mut p = LaurentPoly2::zero();
    for t in terms_array(v)? {
        let (j, k) = term_exponents(t)?;
        let c = match t.get("coeff").and_then(Value::as_f64) {
            Some(c) => c,
            None => {
                let num = t.get("coeff_num").and_then(json_int_text);
                let den = t.get("coeff_den").and_then(json_int_text).unwrap_or_else(|| "1".into());
                let r = num
                    .and_then(|n| parse_rational(&format!("{n}/{den}")))
                    .ok_or_else(|| DimerError::Schema("term needs 'coeff' or 'coeff_num'".into()))?;
                crate::scalar::rational_to_f64(&r)
            }
        };
        p.add_term(j, k, c);
    }
    Ok(p)
}

/// Roots of `a[0] + a[1] x + ... + a[d] x^d`. Leading zeros are trimmed;
/// zero roots from vanishing low coefficients are returned exactly.
pub fn poly_roots(a: &[Complex64]) -> Vec<Complex64> {
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let tiny = scale * 1e-14;
    let mut hi = a.len() - 1;
    while hi > 0 && a[hi].norm() <= tiny {
        hi -= 1;
    }
    let mut lo = 0;
    while lo < hi && a[lo].norm() == 0.0 {
        lo += 1;
    }
    let mut roots = vec![Complex64::zero(); lo];
    let c = &a[lo..=hi];
    roots.extend(nonzero_roots(c));
    roots
}

fn horner(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &ci in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

fn nonzero_roots(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    match d {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => {
            let disc = (c[1] * c[1] - c[0] * c[2] * 4.0).sqrt();
            let q = if (c[1].conj() * disc).re >= 0.0 { -(c[1] + disc) / 2.0 } else { -(c[1] - disc) / 2.0 };
            if q.norm() == 0.0 {
                return vec![Complex64::zero(), Complex64::zero()];
            }
            vec![q / c[2], c[0] / q]
        }
        _ => aberth(c),
    }
}

/// Aberth–Ehrlich simultaneous iteration followed by Newton polishing.
fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    // Initial radius from the Cauchy-type bound of the geometric mean of coefficient ratios.
    let r = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64).max(1e-8);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::zero();
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += diff.inv();
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() || step.norm() > 1e-6 * zi.norm().max(1.0) {
                break;
            }
            *zi -= step;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq_oct_display() -> LaurentPoly2<Rational> {
        let r = |x: i64| Rational::from_i64(x);
        LaurentPoly2::from_terms([((0, 0), r(5)), ((1, 0), r(-1)), ((-1, 0), r(-1)), ((0, 1), r(-1)), ((0, -1), r(-1))])
    }

    #[test]
    fn display_matches_conventional_order() {
        assert_eq!(sq_oct_display().to_string(), "5 - z - 1/z - w - 1/w");
        let p = LaurentPoly2::from_terms([((1, -1), 2.0), ((-1, -2), -0.5), ((0, 0), 1.0)]);
        assert_eq!(p.to_string(), "1 + 2*z/w - 0.5/(z*w^2)");
    }

    #[test]
    fn sign_substitution_and_shift() {
        let p = sq_oct_display().sign_substituted(-1, -1);
        assert_eq!(p.to_string(), "5 + z + 1/z + w + 1/w");
        assert_eq!(p.sign_substituted(-1, -1), sq_oct_display());
        assert_eq!(p.shifted(1, 0).coeff(1, 0), Rational::from_i64(5));
    }

    #[test]
    fn json_round_trip() {
        let p = sq_oct_display();
        assert_eq!(exact_from_json(&exact_to_json(&p)).unwrap(), p);
        let f = p.to_f64();
        assert_eq!(float_from_json(&float_to_json(&f)).unwrap(), f);
        assert_eq!(float_from_json(&exact_to_json(&p)).unwrap(), f);
    }

    #[test]
    fn roots_of_cubic_with_zero_root() {
        // x (x - 1)(x + 2i)
        let a = [Complex64::zero(), Complex64::new(0.0, -2.0), Complex64::new(-1.0, 2.0), Complex64::new(1.0, 0.0)];
        let mut r = poly_roots(&a);
        r.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        assert!(r[0].norm() < 1e-14);
        assert!((r[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r[2] - Complex64::new(0.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn aberth_recovers_roots_of_unity() {
        let mut a = vec![Complex64::zero(); 7];
        a[0] = Complex64::new(-1.0, 0.0);
        a[6] = Complex64::new(1.0, 0.0);
        for r in poly_roots(&a) {
            assert!((r.powi(6) - 1.0).norm() < 1e-12);
            assert!((r.norm() - 1.0).abs() < 1e-12);
        }
    }
}
