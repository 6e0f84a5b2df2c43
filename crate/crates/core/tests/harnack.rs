mod common;

use common::{fixture, ALL_FIXTURES};
use dimer_core::charpoly::characteristic_polynomial;
use dimer_core::harnack::{
    area_check, eigenvalue_pattern_check, eigenvalue_pattern_of, transfer_chain, transfer_identity, two_to_one_at,
    two_to_one_check, HexWeights,
};
use dimer_core::FloatPoly;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn single_row_chain_is_linear_in_z() {
    let w = HexWeights::uniform(1);
    let chain = transfer_chain(&w).unwrap();
    assert_eq!(chain.n, 1);
    let id = transfer_identity(&w, 1).unwrap();
    assert!(id.max_relative_error < 1e-12, "{id:?}");
    let p = characteristic_polynomial(&w.domain().unwrap()).unwrap();
    let ((jmin, jmax), _) = p.exponent_bounds().unwrap();
    assert_eq!(jmax - jmin, 1);
}

#[test]
fn transfer_determinant_matches_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [2, 3, 4] {
        for trial in 0..3 {
            let w = HexWeights::random(n, 0.3, 3.0, &mut rng);
            let id = transfer_identity(&w, trial).unwrap();
            assert_eq!(id.points, (n + 2) * (n + 2));
            assert!(id.max_relative_error < 1e-10, "n={n}: {id:?}");
        }
    }
}

#[test]
fn unit_hexagonal_domains_give_the_honeycomb_curve_up_to_monomials() {
    // The uniform n x n domain has P equal to the honeycomb curve of the
    // n-fold cover, whose Newton polygon is n times the unit triangle.
    let p = characteristic_polynomial(&HexWeights::uniform(2).domain().unwrap()).unwrap();
    let ((jmin, jmax), (kmin, kmax)) = p.exponent_bounds().unwrap();
    assert_eq!((jmax - jmin, kmax - kmin), (2, 2));
}

#[test]
fn zero_weight_is_rejected() {
    let mut w = HexWeights::uniform(2);
    w.b[1][0] = 0.0;
    assert!(transfer_chain(&w).is_err());
    w.b[1][0] = -1.0;
    assert!(w.domain().is_err());
}

#[test]
fn uniform_chain_has_the_eigenvalue_pattern() {
    let chain = transfer_chain(&HexWeights::uniform(2)).unwrap();
    let r = eigenvalue_pattern_check(&chain).unwrap();
    assert!(r.applicable && r.holds, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_chains_have_the_eigenvalue_pattern(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = transfer_chain(&HexWeights::random(n, 0.2, 5.0, &mut rng)).unwrap();
        let r = eigenvalue_pattern_check(&chain).unwrap();
        prop_assert!(r.applicable);
        prop_assert!(r.violations.is_empty(), "{:?}", r);
    }
}

#[test]
fn negative_entry_makes_the_check_inapplicable() {
    let t = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, -1.0, 1.0, 0.0, 1.0]);
    let r = eigenvalue_pattern_of(&[t.clone(), t]).unwrap();
    assert!(!r.applicable);
}

#[test]
fn fixtures_are_two_to_one() {
    for name in ALL_FIXTURES {
        let p = characteristic_polynomial(&fixture(name)).unwrap();
        let r = two_to_one_check(&p, 200, 17).unwrap();
        assert_eq!(r.checks, 200);
        assert!(r.passed(), "{name}: {:?}", &r.violations[..r.violations.len().min(3)]);
    }
}

#[test]
fn node_curve_is_one_to_one_at_the_node() {
    let p = characteristic_polynomial(&fixture("square_2x2.json")).unwrap();
    let r = two_to_one_at(&p, 0.0, 0.0);
    assert!(r.passed() && r.nodes == 1, "{r:?}");
}

#[test]
fn product_of_two_lines_is_not_maximal() {
    // (1 + z + w)(1 + 2z + 3w) + 0.01: over the overlap of the two line
    // amoebas the torus carries four roots.
    let a = FloatPoly::from_terms([((0, 0), 1.0), ((1, 0), 1.0), ((0, 1), 1.0)]);
    let b = FloatPoly::from_terms([((0, 0), 1.0), ((1, 0), 2.0), ((0, 1), 3.0)]);
    let mut p = a.mul(&b);
    p.add_term(0, 0, 0.01);
    let r = two_to_one_check(&p, 100, 5).unwrap();
    assert!(!r.passed());
    assert!(r.violations.iter().any(|v| v.roots == 4), "{:?}", &r.violations[..r.violations.len().min(3)]);
}

#[test]
fn hexagonal_amoeba_has_maximal_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let p = characteristic_polynomial(&HexWeights::random(2, 0.5, 2.0, &mut rng).domain().unwrap()).unwrap();
    let r = area_check(&p, 600, 2);
    assert!(r.relative_gap < 0.01, "{r:?}");
    assert!(two_to_one_check(&p, 50, 3).unwrap().passed());
}
