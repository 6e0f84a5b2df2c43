mod common;

use std::collections::{BTreeSet, HashMap};

use common::{fixture, ALL_FIXTURES};
use dimer_core::lattice::{FundamentalDomain, TorusGraph};
use dimer_core::sampler::{
    chain_rng, corner_matching, double_dimer_loops, loop_census, matching_in_class, sample_exact, sample_mcmc,
    variance_profile, Chain, FaceTable, LoopOptions, VarianceOptions,
};

/// Exact Boltzmann probability of each matching, keyed by its edge list.
fn boltzmann(torus: &TorusGraph, class: Option<(i32, i32)>) -> HashMap<Vec<usize>, f64> {
    let records = torus.enumerate_matchings(100_000).unwrap();
    let kept: Vec<_> = records.iter().filter(|r| class.is_none_or(|c| r.height_change == c)).collect();
    let emin = kept.iter().map(|r| r.energy).fold(f64::INFINITY, f64::min);
    let z: f64 = kept.iter().map(|r| (emin - r.energy).exp()).sum();
    kept.iter().map(|r| (r.matching.by_white.clone(), (emin - r.energy).exp() / z)).collect()
}

/// The class `n (c + t (v - c))` for the centroid `c` of the `G_1` classes
/// and the first of them `v`.
fn interior_class(d: &FundamentalDomain, n: usize, t: f64) -> (i32, i32) {
    let classes: BTreeSet<(i32, i32)> =
        d.torus(1).unwrap().enumerate_matchings(1000).unwrap().into_iter().map(|r| r.height_change).collect();
    let k = classes.len() as f64;
    let c = classes.iter().fold((0.0, 0.0), |a, &(x, y)| (a.0 + x as f64 / k, a.1 + y as f64 / k));
    let v = classes.iter().next().unwrap();
    let p = (c.0 + t * (v.0 as f64 - c.0), c.1 + t * (v.1 as f64 - c.1));
    ((n as f64 * p.0).round() as i32, (n as f64 * p.1).round() as i32)
}

#[test]
fn exact_sampler_reproduces_boltzmann_frequencies() {
    for (name, n) in [("honeycomb.json", 1), ("square_4x4_weighted.json", 1), ("square_octagon.json", 1)] {
        let torus = fixture(name).torus(n).unwrap();
        let exact = boltzmann(&torus, None);
        let count = 20_000;
        let mut hits: HashMap<Vec<usize>, usize> = HashMap::new();
        for m in sample_exact(&torus, 11, count).unwrap() {
            *hits.entry(m.by_white).or_default() += 1;
        }
        for (m, &p) in &exact {
            let f = hits.get(m).copied().unwrap_or(0) as f64 / count as f64;
            let sigma = (p * (1.0 - p) / count as f64).sqrt();
            assert!((f - p).abs() <= 4.0 * sigma + 1e-12, "{name} {m:?}: {f} vs {p}");
        }
        assert!(hits.keys().all(|m| exact.contains_key(m)));
    }
}

#[test]
fn exact_sampler_is_deterministic_per_seed() {
    let torus = fixture("square_2x2.json").torus(1).unwrap();
    let a = sample_exact(&torus, 5, 50).unwrap();
    let b = sample_exact(&torus, 5, 50).unwrap();
    let c = sample_exact(&torus, 6, 50).unwrap();
    assert_eq!(a.iter().map(|m| &m.by_white).collect::<Vec<_>>(), b.iter().map(|m| &m.by_white).collect::<Vec<_>>());
    assert_ne!(a.iter().map(|m| &m.by_white).collect::<Vec<_>>(), c.iter().map(|m| &m.by_white).collect::<Vec<_>>());
}

#[test]
fn class_construction_reaches_exactly_the_enumerated_classes() {
    for name in ALL_FIXTURES {
        let d = fixture(name);
        let n = if d.whites.len() > 4 { 1 } else { 2 };
        let torus = d.torus(n).unwrap();
        let present: BTreeSet<(i32, i32)> =
            torus.enumerate_matchings(1_000_000).unwrap().into_iter().map(|r| r.height_change).collect();
        let (lo, hi) = present.iter().fold(((0, 0), (0, 0)), |(lo, hi), &(x, y)| {
            ((lo.0.min(x), lo.1.min(y)), (hi.0.max(x), hi.1.max(y)))
        });
        for x in lo.0 - 1..=hi.0 + 1 {
            for y in lo.1 - 1..=hi.1 + 1 {
                match matching_in_class(&torus, (x, y)) {
                    Ok(m) => {
                        assert!(present.contains(&(x, y)), "{name}: spurious class ({x},{y})");
                        assert!(torus.is_perfect_matching(&m));
                        assert_eq!(torus.height_change(&m), (x, y));
                    }
                    Err(_) => assert!(!present.contains(&(x, y)), "{name}: missed class ({x},{y})"),
                }
            }
        }
    }
}

#[test]
fn chain_keeps_perfect_matchings_in_their_class() {
    let d = fixture("square_octagon.json");
    let torus = d.torus(6).unwrap();
    for t in [0.0, 0.3, 0.6] {
        let target = interior_class(&d, 6, t);
        let m = matching_in_class(&torus, target).unwrap();
        let run = sample_mcmc(&torus, m, 3, 200).unwrap();
        assert!(!run.frozen && run.accepted > 0);
        assert!(torus.is_perfect_matching(&run.matching));
        assert_eq!(torus.height_change(&run.matching), target);
    }
}

#[test]
fn chain_samples_the_boltzmann_measure_of_its_class() {
    let d = fixture("square_4x4_weighted.json");
    let torus = d.torus(1).unwrap();
    let class = (0, 0);
    let exact = boltzmann(&torus, Some(class));
    assert!(exact.len() > 2);
    let mut edge_exact = vec![0.0; torus.num_edges()];
    for (m, p) in &exact {
        for &e in m {
            edge_exact[e] += p;
        }
    }
    let faces = FaceTable::new(&torus);
    let mut chain = Chain::new(&torus, &faces, matching_in_class(&torus, class).unwrap(), chain_rng(2, 0)).unwrap();
    chain.run(500);
    let steps = 40_000;
    let mut edge_freq = vec![0.0; torus.num_edges()];
    for _ in 0..steps {
        chain.sweep();
        for &e in &chain.matching().by_white {
            edge_freq[e] += 1.0 / steps as f64;
        }
    }
    for (e, (f, p)) in edge_freq.iter().zip(&edge_exact).enumerate() {
        assert!((f - p).abs() < 0.02, "edge {e}: {f} vs {p}");
    }
}

#[test]
fn corner_classes_are_frozen() {
    let d = fixture("honeycomb.json");
    let torus = d.torus(8).unwrap();
    for dir in [(1.0, 0.0), (0.0, -1.0), (-1.0, 1.0)] {
        let m = corner_matching(&torus, dir).unwrap();
        let run = sample_mcmc(&torus, m.clone(), 1, 10).unwrap();
        assert!(run.frozen);
        assert_eq!(run.matching.by_white, m.by_white);
    }
    let interior = matching_in_class(&torus, interior_class(&d, 8, 0.0)).unwrap();
    assert!(!sample_mcmc(&torus, interior, 1, 1).unwrap().frozen);
}

#[test]
fn loops_around_a_rotated_face() {
    let d = fixture("square.json");
    let torus = d.torus(6).unwrap();
    let faces = FaceTable::new(&torus);
    let m = matching_in_class(&torus, interior_class(&d, 6, 0.0)).unwrap();
    let chain = Chain::new(&torus, &faces, m.clone(), chain_rng(0, 0)).unwrap();
    let f = (0..torus.num_faces()).find(|&f| chain.rotatable(f)).unwrap();
    assert_eq!(double_dimer_loops(&torus, &faces, &m, &m, f), 0);
    let mut rotated = Chain::new(&torus, &faces, m.clone(), chain_rng(0, 0)).unwrap();
    // Unit weights: every rotation is accepted.
    assert!(rotated.try_rotate(f));
    assert_eq!(double_dimer_loops(&torus, &faces, &m, rotated.matching(), f), 1);
    let far = (0..torus.num_faces())
        .find(|&g| {
            let (a, b) = (faces.centers[f], faces.centers[g]);
            (a[0] - b[0]).abs() > 2.0 && (a[1] - b[1]).abs() > 2.0
        })
        .unwrap();
    assert_eq!(double_dimer_loops(&torus, &faces, &m, rotated.matching(), far), 0);
}

#[test]
fn variance_separates_phases_on_small_tori() {
    let opts = VarianceOptions { n: 16, samples: 40, chains: 2, r_range: Some((2, 6)), ..Default::default() };
    let gas = variance_profile(&fixture("square_octagon.json"), 0.0, 0.0, &opts).unwrap();
    let liquid = variance_profile(&fixture("honeycomb.json"), 0.0, 0.0, &opts).unwrap();
    let frozen = variance_profile(&fixture("honeycomb.json"), 10.0, 0.0, &opts).unwrap();
    assert!(gas.fit.unwrap().slope.abs() < 0.05, "{:?}", gas.fit);
    assert!(liquid.fit.unwrap().slope > 0.05, "{:?}", liquid.fit);
    assert!(frozen.frozen && frozen.points.iter().all(|p| p.variance == 0.0));
}

#[test]
fn loop_census_is_reproducible() {
    let opts = LoopOptions { sizes: vec![4, 6], runs: 30, seed: 9, ..Default::default() };
    let d = fixture("honeycomb.json");
    let a = loop_census(&d, 0.0, 0.0, &opts).unwrap();
    let b = loop_census(&d, 0.0, 0.0, &opts).unwrap();
    for (x, y) in a.runs.iter().zip(&b.runs) {
        assert_eq!(x.histogram, y.histogram);
        assert_eq!(x.histogram.iter().sum::<usize>(), 30);
    }
}
