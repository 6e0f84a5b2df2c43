mod common;

use common::{fixture, ALL_FIXTURES};
use dimer_core::charpoly::MagneticKasteleyn;
use dimer_core::gibbs::{
    edge_covariance, edge_covariance_split, edge_probability, fit_exponential, fit_power_law, torus_edge_probability, EdgeRef, InverseKernel,
};
use dimer_core::lattice::{FundamentalDomain, TorusGraph};
use dimer_core::{DimerError, Rational, Scalar};

fn weight(torus: &TorusGraph, d: &FundamentalDomain, matching: &[usize]) -> Rational {
    matching
        .iter()
        .fold(Rational::from_i64(1), |acc, &i| acc * d.edges[torus.edge(i).base].exact_weight.clone().unwrap())
}

/// Probability of each edge set by summing matching weights.
fn enumerated(torus: &TorusGraph, d: &FundamentalDomain, sets: &[Vec<usize>]) -> Option<Vec<Rational>> {
    let records = match torus.enumerate_matchings(10_000) {
        Ok(r) => r,
        Err(DimerError::TooLarge { .. }) => return None,
        Err(e) => panic!("{e}"),
    };
    let mut z = Rational::from_i64(0);
    let mut hits = vec![Rational::from_i64(0); sets.len()];
    for rec in &records {
        let m = &rec.matching.by_white;
        let wt = weight(torus, d, m);
        for (h, set) in hits.iter_mut().zip(sets) {
            if set.iter().all(|e| m.contains(e)) {
                *h += wt.clone();
            }
        }
        z += wt;
    }
    Some(hits.into_iter().map(|h| h / z.clone()).collect())
}

#[test]
fn honeycomb_edges_have_probability_one_third() {
    let d = fixture("honeycomb.json");
    let k = InverseKernel::new(&d, 0.0, 0.0).unwrap();
    for e in 0..d.edges.len() {
        let p = edge_probability(&k, &[EdgeRef::new(e, (0, 0))]).unwrap();
        assert!((p.value - 1.0 / 3.0).abs() < 1e-9, "edge {e}: {}", p.value);
    }
}

#[test]
fn vertex_sums_are_one() {
    let fields = [(0.0, 0.0), (0.4, 0.25), (1.2, 0.3), (-0.7, 0.5)];
    for name in ALL_FIXTURES {
        let d = fixture(name);
        for &(bx, by) in &fields {
            let k = InverseKernel::new(&d, bx, by).unwrap();
            let probs: Vec<f64> =
                (0..d.edges.len()).map(|e| edge_probability(&k, &[EdgeRef::new(e, (0, 0))]).unwrap().value).collect();
            for &p in &probs {
                assert!((-1e-9..=1.0 + 1e-9).contains(&p), "{name} ({bx},{by}): {p}");
            }
            for w in 0..d.whites.len() {
                let s: f64 = d.white_edges(w).iter().map(|&e| probs[e]).sum();
                assert!((s - 1.0).abs() < 1e-9, "{name} ({bx},{by}) white {w}: {s}");
            }
            for b in 0..d.blacks.len() {
                let s: f64 = d.black_edges(b).iter().map(|&e| probs[e]).sum();
                assert!((s - 1.0).abs() < 1e-9, "{name} ({bx},{by}) black {b}: {s}");
            }
        }
    }
}

#[test]
fn torus_probabilities_match_enumeration_exactly() {
    for name in ALL_FIXTURES {
        let d = fixture(name);
        let kast = MagneticKasteleyn::new(&d).unwrap();
        for n in 1..=2 {
            let torus = d.torus(n).unwrap();
            let m = torus.num_edges();
            let mut sets: Vec<Vec<usize>> = (0..m).map(|e| vec![e]).collect();
            sets.extend((0..m).flat_map(|a| (a + 1..m).step_by(3).map(move |b| vec![a, b])));
            let Some(expected) = enumerated(&torus, &d, &sets) else { continue };
            for (set, want) in sets.iter().zip(&expected) {
                let got: Rational = torus_edge_probability(&kast, &torus, set).unwrap();
                assert_eq!(&got, want, "{name} n={n} {set:?}");
            }
            for w in 0..torus.num_whites() {
                let s = torus.white_edges(w).iter().fold(Rational::from_i64(0), |acc, &e| {
                    acc + torus_edge_probability::<Rational>(&kast, &torus, &[e]).unwrap()
                });
                assert_eq!(s, Rational::from_i64(1), "{name} n={n}");
            }
        }
    }
}

#[test]
fn torus_probabilities_converge_to_infinite_volume_in_gaseous_phase() {
    let d = fixture("square_octagon.json");
    let kast = MagneticKasteleyn::new(&d).unwrap();
    let k = InverseKernel::new(&d, 0.0, 0.0).unwrap();
    let tori: Vec<TorusGraph> = [4, 6, 8].iter().map(|&n| d.torus(n).unwrap()).collect();
    for e in 0..d.edges.len() {
        let inf = edge_probability(&k, &[EdgeRef::new(e, (0, 0))]).unwrap().value;
        let gaps: Vec<f64> = tori
            .iter()
            .map(|t| {
                let fin: f64 = torus_edge_probability(&kast, t, &[t.edge_instance(e, (0, 0))]).unwrap();
                (inf - fin).abs()
            })
            .collect();
        // Exponential convergence in n; at n = 4 the gap is still up to 1.2e-2.
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "edge {e}: {gaps:?}");
        assert!(gaps[2] < 1e-3 && gaps[0] < 2e-2, "edge {e}: {gaps:?}");
    }
}

#[test]
fn pair_probabilities_follow_inclusion_exclusion() {
    let d = fixture("square_octagon.json");
    let k = InverseKernel::new(&d, 0.2, 0.1).unwrap();
    let e1 = EdgeRef::new(0, (0, 0));
    let p1 = edge_probability(&k, &[e1]).unwrap().value;
    for (e, cell) in [(1, (0, 0)), (3, (1, 0)), (5, (2, 1)), (2, (0, 3))] {
        let e2 = EdgeRef::new(e, cell);
        let p2 = edge_probability(&k, &[e2]).unwrap().value;
        let joint = edge_probability(&k, &[e1, e2]).unwrap().value;
        let cov = edge_covariance(&k, e1, e2).unwrap();
        assert!((joint - p1 * p2 - cov).abs() < 1e-9, "{e} {cell:?}");
        assert!((-1e-9..=p1.min(p2) + 1e-9).contains(&joint));
    }
    assert!(edge_probability(&k, &[e1, e1]).is_err());
    assert!(edge_covariance(&k, e1, e1).is_err());
}

#[test]
fn conflicting_edges_never_appear_together() {
    let d = fixture("honeycomb.json");
    let k = InverseKernel::new(&d, 0.3, -0.2).unwrap();
    let w = d.white_edges(0);
    let (e1, e2) = (EdgeRef::new(w[0], (0, 0)), EdgeRef::new(w[1], (0, 0)));
    let joint = edge_probability(&k, &[e1, e2]).unwrap().value;
    assert!(joint.abs() < 1e-10, "{joint}");
    let p1 = edge_probability(&k, &[e1]).unwrap().value;
    let p2 = edge_probability(&k, &[e2]).unwrap().value;
    assert!((edge_covariance(&k, e1, e2).unwrap() + p1 * p2).abs() < 1e-10);
}

#[test]
fn kernel_is_stable_under_tolerance_change() {
    let d = fixture("square_4x4_weighted.json");
    let coarse = InverseKernel::with_tolerance(&d, 1.2, 0.3, 1e-7).unwrap();
    let fine = InverseKernel::new(&d, 1.2, 0.3).unwrap();
    for offset in [(0, 0), (2, -1), (-3, 4)] {
        let a = coarse.entry(3, 5, offset).unwrap();
        let b = fine.entry(3, 5, offset).unwrap();
        assert!((a.value - b.value).abs() <= a.error.max(1e-7) * 10.0, "{offset:?}: {a:?} {b:?}");
    }
}

#[test]
fn frozen_field_has_deterministic_edges() {
    let d = fixture("square_octagon.json");
    let k = InverseKernel::new(&d, 10.0, 0.0).unwrap();
    let probs: Vec<f64> =
        (0..d.edges.len()).map(|e| edge_probability(&k, &[EdgeRef::new(e, (0, 0))]).unwrap().value).collect();
    assert!(probs.iter().all(|p| p.min(1.0 - p) < 1e-6), "{probs:?}");
}

#[test]
fn gaseous_kernel_decays_exponentially() {
    let d = fixture("square_octagon.json");
    let k = InverseKernel::new(&d, 0.0, 0.0).unwrap();
    let samples: Vec<(f64, f64)> =
        (2..=12).map(|r| (r as f64, k.entry(0, 0, (r, 0)).unwrap().value)).filter(|s| s.1 != 0.0).collect();
    let fit = fit_exponential(&samples).unwrap();
    assert!(fit.slope < -0.1 && fit.r_squared > 0.99, "{fit:?}");
}

#[test]
fn shifted_contour_gives_the_same_kernel() {
    let d = fixture("square_octagon.json");
    let k0 = InverseKernel::new(&d, 0.0, 0.0).unwrap();
    let k1 = InverseKernel::new(&d, 0.0, 0.0).unwrap().with_contour(0.3, -0.5).unwrap();
    for offset in [(0, 0), (1, 2), (-3, 1), (4, -4)] {
        for (b, w) in [(0, 0), (1, 3), (2, 1)] {
            let a = k0.entry(b, w, offset).unwrap().value;
            let c = k1.entry(b, w, offset).unwrap().value;
            assert!((a - c).abs() < 1e-10, "{offset:?} ({b},{w}): {a} vs {c}");
        }
    }
    // Leaving the hole crosses the spectral curve.
    assert!(InverseKernel::new(&d, 0.0, 0.0).unwrap().with_contour(0.0, 1.5).is_err());
    assert!(InverseKernel::new(&d, 1.2, 0.3).unwrap().with_contour(1.2, 0.4).is_err());
}

#[test]
fn covariance_decay_rates() {
    let d = fixture("honeycomb.json");
    let k = InverseKernel::new(&d, 0.0, 0.0).unwrap();
    let liquid: Vec<(f64, f64)> = (5..=40)
        .map(|r| (r as f64, edge_covariance(&k, EdgeRef::new(0, (0, 0)), EdgeRef::new(0, (r, r))).unwrap()))
        .collect();
    let fit = fit_power_law(&liquid).unwrap();
    assert!((fit.slope + 2.0).abs() < 0.1 && fit.r_squared > 0.999, "{fit:?}");

    let d = fixture("square_octagon.json");
    let forward = InverseKernel::new(&d, 0.0, 0.0).unwrap().with_contour(0.0, 0.7).unwrap();
    let backward = InverseKernel::new(&d, 0.0, 0.0).unwrap().with_contour(0.0, -0.7).unwrap();
    let gas: Vec<(f64, f64)> = (5..=40)
        .map(|r| {
            (r as f64, edge_covariance_split(&forward, &backward, EdgeRef::new(0, (0, 0)), EdgeRef::new(0, (r, 0))).unwrap())
        })
        .collect();
    let fit = fit_exponential(&gas).unwrap();
    assert!(fit.slope < -1.0 && fit.r_squared > 0.99, "{fit:?}");
}
