//! Adaptive Gauss–Kronrod (7/15) quadrature with user breakpoints, and
//! fixed Gauss–Legendre rules.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    /// False when the subdivision budget ran out before the tolerance was met.
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &mut impl FnMut(f64) -> Vec<f64>, a: f64, b: f64) -> (Vec<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut gauss: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for i in 0..7 {
        let x = h * XGK[i];
        let (lo, hi) = (f(c - x), f(c + x));
        for j in 0..kronrod.len() {
            let s = lo[j] + hi[j];
            kronrod[j] += WGK[i] * s;
            if i % 2 == 1 {
                gauss[j] += WG[i / 2] * s;
            }
        }
    }
    let err = kronrod.iter().zip(&gauss).map(|(k, g)| ((k - g) * h).abs()).fold(0.0, f64::max);
    (kronrod.into_iter().map(|k| k * h).collect(), err)
}

/// Integrates `f` over `[a, b]`, splitting first at `breaks` (which must lie
/// inside the interval), then bisecting the worst panel until the summed
/// error estimate falls below `abs_tol`.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, breaks: &[f64], abs_tol: f64, max_panels: usize) -> QuadResult {
    let r = integrate_vec(|x| vec![f(x)], a, b, breaks, abs_tol, max_panels);
    QuadResult { value: r.values[0], error: r.error, evaluations: r.evaluations, converged: r.converged }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VecQuadResult {
    pub values: Vec<f64>,
    /// Summed panel estimates of the largest component error.
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Vector-valued [`integrate`]: every component shares the panels and the
/// error of a panel is its worst component.
pub fn integrate_vec(
    mut f: impl FnMut(f64) -> Vec<f64>,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> VecQuadResult {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-15 * (b - a).abs());
    let mut panels: Vec<(f64, f64, Vec<f64>, f64)> = Vec::new();
    let mut evals = 0;
    for w in pts.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        evals += 15;
        panels.push((w[0], w[1], v, e));
    }
    let mut converged = true;
    loop {
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol {
            break;
        }
        if panels.len() >= max_panels {
            converged = false;
            break;
        }
        let (idx, _) = panels.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).unwrap();
        let (lo, hi, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            converged = false;
            break;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evals += 30;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
    // Sum in interval order so the result does not depend on refinement history.
    panels.sort_by(|x, y| x.0.total_cmp(&y.0));
    let dim = panels.first().map_or(0, |p| p.2.len());
    let mut values = vec![0.0; dim];
    for p in &panels {
        for (v, x) in values.iter_mut().zip(&p.2) {
            *v += x;
        }
    }
    VecQuadResult { values, error: panels.iter().map(|p| p.3).sum(), evaluations: evals, converged }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
