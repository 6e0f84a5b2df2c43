mod common;

use common::{enumerated_partition, enumerated_polynomial, fixture, ALL_FIXTURES};
use dimer_core::charpoly::{
    characteristic_polynomial, characteristic_polynomial_exact, kasteleyn_eval, kasteleyn_signs, log_partition_function_torus,
    log_z_per_domain, normalize_sign_convention, partition_function_torus, poly_enlarged, MagneticKasteleyn,
};
use dimer_core::newton::newton_polygon;
use dimer_core::scalar::rational_to_f64;
use dimer_core::{ExactPoly, Rational, Scalar};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn characteristic_polynomial_counts_matchings_by_height_change() {
    for name in ALL_FIXTURES {
        let d = fixture(name);
        let exact = characteristic_polynomial_exact(&d).unwrap();
        assert_eq!(exact, enumerated_polynomial(&d), "{name}");
        let float = characteristic_polynomial(&d).unwrap().pruned(1e-9);
        assert_eq!(float.support(), exact.support(), "{name}");
        for (&(j, k), c) in exact.terms() {
            let f = float.coeff(j, k);
            let e = rational_to_f64(c);
            assert!((f - e).abs() <= 1e-9 * e.abs().max(1.0), "{name} ({j},{k}): {f} vs {e}");
        }
    }
}

#[test]
fn signs_satisfy_face_condition() {
    for name in ALL_FIXTURES {
        let d = fixture(name);
        let s = kasteleyn_signs(&d).unwrap();
        assert!(s.satisfies_face_condition(&d), "{name}");
        assert_eq!(s, kasteleyn_signs(&d).unwrap(), "deterministic");
    }
    let sq = fixture("square.json");
    let s = kasteleyn_signs(&sq).unwrap();
    let minus = s.signs.iter().filter(|&&x| x < 0).count();
    assert!(minus == 1 || minus == 3, "{:?}", s.signs);
}

#[test]
fn displayed_polynomials() {
    let cases = [
        ("square_octagon.json", "5 - z - 1/z - w - 1/w"),
        ("square_2x2.json", "4 - z - 1/z - w - 1/w"),
        ("square.json", "1 - 1/z - w - w/z"),
    ];
    for (name, shown) in cases {
        let p = normalize_sign_convention(&characteristic_polynomial_exact(&fixture(name)).unwrap()).unwrap();
        assert_eq!(p.to_string(), shown, "{name}");
    }
    let honey = characteristic_polynomial_exact(&fixture("honeycomb.json")).unwrap();
    assert_eq!(honey.len(), 3);
    assert!(honey.terms().all(|(_, c)| c.magnitude() == 1.0));
}

#[test]
fn weighted_square_newton_polygon() {
    let p = characteristic_polynomial(&fixture("square_4x4_weighted.json")).unwrap().pruned(1e-9);
    let n = newton_polygon(&p);
    let mut v = n.vertices.clone();
    v.sort();
    assert_eq!(v, vec![(-2, 0), (0, -2), (0, 2), (2, 0)]);
    assert_eq!(n.interior.len(), 5);
}

#[test]
fn unit_point_evaluations() {
    let honey = fixture("honeycomb.json");
    let k = MagneticKasteleyn::new(&honey).unwrap();
    let one = Complex64::new(1.0, 0.0);
    // With the torus sign pattern all three matchings add up at (-1, -1).
    assert!((kasteleyn_eval(&k, -one, -one).unwrap().det().norm() - 3.0).abs() < 1e-12);
    assert!((kasteleyn_eval(&k, one, one).unwrap().det().norm() - 1.0).abs() < 1e-12);
    assert!(kasteleyn_eval(&k, Complex64::new(0.0, 0.0), one).is_err());

    let so = fixture("square_octagon.json");
    let k = MagneticKasteleyn::new(&so).unwrap();
    let p = characteristic_polynomial(&so).unwrap();
    let m = Complex64::new(-1.0, 0.0);
    let det = k.normalized_det(&m, &m).unwrap();
    assert!((det - p.eval_complex(m, m)).norm() < 1e-12);
}

#[test]
fn four_term_partition_function_matches_enumeration() {
    for name in ALL_FIXTURES {
        let d = fixture(name);
        for n in 1..=2 {
            let Some(expected) = enumerated_partition(&d, n, 300_000) else { continue };
            let z: Rational = partition_function_torus(&d, n).unwrap();
            assert_eq!(z, expected, "{name} n={n}");
        }
    }
    let so = fixture("square_octagon.json");
    assert_eq!(partition_function_torus::<Rational>(&so, 1).unwrap(), Rational::from_i64(9));
    assert_eq!(partition_function_torus::<Rational>(&fixture("honeycomb.json"), 1).unwrap(), Rational::from_i64(3));
}

#[test]
fn product_formula_matches_torus_determinant() {
    let points = [Complex64::new(0.7, 0.4), Complex64::new(-1.3, 0.2), Complex64::new(0.2, -0.9)];
    for name in ALL_FIXTURES {
        let d = fixture(name);
        let k = MagneticKasteleyn::new(&d).unwrap();
        let p = characteristic_polynomial(&d).unwrap();
        for n in 2..=3 {
            let torus = d.torus(n).unwrap();
            for (&z, &w) in points.iter().zip(points.iter().rev()) {
                let det: Complex64 = k.torus_normalized_det(&torus, &z, &w).unwrap();
                let prod = poly_enlarged(&p, n, z, w);
                assert!((det - prod).norm() <= 1e-10 * prod.norm().max(1.0), "{name} n={n}: {det} vs {prod}");
            }
        }
    }
}

#[test]
fn log_z_matches_finite_tori() {
    let p = characteristic_polynomial(&fixture("square_octagon.json")).unwrap();
    let f = log_z_per_domain(&p, 1e-12).unwrap();
    for n in [4, 6] {
        let z = log_partition_function_torus(&p, n).unwrap() / (n * n) as f64;
        assert!((z - f).abs() < 1e-2, "n={n}: {z} vs {f}");
    }
    assert!((log_z_per_domain(&ExactPoly::monomial(0, 0, Rational::from_i64(7)).to_f64(), 1e-12).unwrap() - 7f64.ln()).abs() < 1e-13);
}

#[test]
fn uniform_energy_shift_lowers_log_z() {
    let d = fixture("honeycomb.json");
    let a = 0.37;
    let shifted = d.with_energies(&d.edges.iter().map(|e| e.energy + a).collect::<Vec<_>>()).unwrap();
    let f0 = log_z_per_domain(&characteristic_polynomial(&d).unwrap(), 1e-12).unwrap();
    let f1 = log_z_per_domain(&characteristic_polynomial(&shifted).unwrap(), 1e-12).unwrap();
    assert!((f0 - f1 - a).abs() < 1e-9, "{f0} {f1}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_transformations_rescale_polynomial(f in proptest::collection::vec(-1.0f64..1.0, 8)) {
        let d = fixture("square_octagon.json");
        let nw = d.whites.len();
        let energies: Vec<f64> = d.edges.iter().map(|e| e.energy + f[nw + e.black] - f[e.white]).collect();
        let g = d.with_energies(&energies).unwrap();
        let p = characteristic_polynomial(&d).unwrap().pruned(1e-9);
        let q = characteristic_polynomial(&g).unwrap().pruned(1e-9);
        let ratio = q.coeff(0, 0) / p.coeff(0, 0);
        prop_assert!(ratio > 0.0);
        for (&(j, k), c) in p.terms() {
            prop_assert!((q.coeff(j, k) - ratio * c).abs() < 1e-9 * ratio.max(1.0));
        }
    }

    #[test]
    fn magnetic_shift_scales_coefficients(bx in -2.0f64..2.0, by in -2.0f64..2.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let p = characteristic_polynomial(&fixture("square_4x4_weighted.json")).unwrap();
        let m = p.magnetic(bx, by);
        let z = Complex64::from_polar(1.0, x);
        let w = Complex64::from_polar(1.0, y);
        let lhs = m.eval_complex(z, w);
        let rhs = p.eval_complex(z * bx.exp(), w * by.exp());
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn normalization_is_idempotent(sz in prop::bool::ANY, sw in prop::bool::ANY, neg in prop::bool::ANY, dj in -2i32..=2, dk in -2i32..=2) {
        let p = normalize_sign_convention(&characteristic_polynomial_exact(&fixture("square_octagon.json")).unwrap()).unwrap();
        let mut q = p.sign_substituted(if sz { -1 } else { 1 }, if sw { -1 } else { 1 });
        if neg {
            q = q.scaled(&Rational::from_i64(-1));
        }
        prop_assert_eq!(normalize_sign_convention(&q).unwrap(), p.clone());
        let moved = normalize_sign_convention(&q.shifted(dj, dk)).unwrap();
        prop_assert_eq!(normalize_sign_convention(&moved).unwrap(), moved);
    }
}
