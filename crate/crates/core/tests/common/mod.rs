#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use dimer_core::charpoly::pattern_sign;
use dimer_core::lattice::{parse_domain, FundamentalDomain};
use dimer_core::{DimerError, ExactPoly, Rational, Scalar};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> FundamentalDomain {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse_domain(&text).expect("fixture valid")
}

pub const ALL_FIXTURES: [&str; 5] =
    ["honeycomb.json", "square.json", "square_2x2.json", "square_octagon.json", "square_4x4_weighted.json"];

pub fn matching_weight(d: &FundamentalDomain, edges: &[usize]) -> Rational {
    edges.iter().fold(Rational::from_i64(1), |acc, &e| {
        acc * d.edges[e].exact_weight.clone().expect("fixture weights are rational")
    })
}

/// Signed weighted census of `G_1` matchings by height change.
pub fn enumerated_polynomial(d: &FundamentalDomain) -> ExactPoly {
    let torus = d.torus(1).unwrap();
    let mut census: BTreeMap<(i32, i32), Rational> = BTreeMap::new();
    for rec in torus.enumerate_matchings(1_000_000).unwrap() {
        let edges: Vec<usize> = rec.matching.by_white.iter().map(|&i| torus.edge(i).base).collect();
        *census.entry(rec.height_change).or_insert_with(|| Rational::from_i64(0)) += matching_weight(d, &edges);
    }
    ExactPoly::from_terms(census.into_iter().map(|((j, k), c)| ((j, k), c * Rational::from_i64(pattern_sign(j, k) as i64))))
}

pub fn enumerated_partition(d: &FundamentalDomain, n: usize, cap: usize) -> Option<Rational> {
    let torus = d.torus(n).unwrap();
    let records = match torus.enumerate_matchings(cap) {
        Ok(r) => r,
        Err(DimerError::TooLarge { .. }) => return None,
        Err(e) => panic!("{e}"),
    };
    Some(records.iter().fold(Rational::from_i64(0), |acc, rec| {
        let edges: Vec<usize> = rec.matching.by_white.iter().map(|&i| torus.edge(i).base).collect();
        acc + matching_weight(d, &edges)
    }))
}
