mod common;

use std::collections::BTreeMap;

use common::{fixture, ALL_FIXTURES};
use dimer_core::lattice::{FaceInstance, DEFAULT_ENUMERATION_CAP};
use dimer_core::DimerError;

#[test]
fn fixtures_parse_with_expected_faces() {
    let d = fixture("honeycomb.json");
    assert_eq!(d.faces.len(), 1);
    assert_eq!(d.faces[0].degree(), 6);

    let d = fixture("square_octagon.json");
    let mut degrees: Vec<usize> = d.faces.iter().map(|f| f.degree()).collect();
    degrees.sort();
    assert_eq!(degrees, vec![4, 4, 8, 8]);

    for name in ALL_FIXTURES {
        let d = fixture(name);
        assert_eq!(d.num_vertices() as i64 - d.edges.len() as i64 + d.faces.len() as i64, 0, "{name}");
    }
}

#[test]
fn torus_counts_scale_with_n_squared() {
    let d = fixture("honeycomb.json");
    let t1 = d.torus(1).unwrap();
    assert_eq!((t1.num_vertices(), t1.num_edges()), (2, 3));
    let t2 = d.torus(2).unwrap();
    assert_eq!((t2.num_vertices(), t2.num_edges()), (8, 12));
    let t2 = fixture("square_octagon.json").torus(2).unwrap();
    assert_eq!((t2.num_vertices(), t2.num_edges()), (32, 48));
}

#[test]
fn enumeration_counts() {
    let hc = fixture("honeycomb.json").torus(1).unwrap().enumerate_matchings(DEFAULT_ENUMERATION_CAP).unwrap();
    let mut classes: Vec<_> = hc.iter().map(|r| r.height_change).collect();
    classes.sort();
    assert_eq!(classes, vec![(0, -1), (0, 0), (1, 0)]);

    let so = fixture("square_octagon.json").torus(1).unwrap().enumerate_matchings(DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(so.len(), 9);
    let mut by_class: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for r in &so {
        *by_class.entry(r.height_change).or_default() += 1;
    }
    assert_eq!(by_class.values().copied().max(), Some(5));
    assert_eq!(by_class.len(), 5);
}

#[test]
fn enumeration_cap_is_enforced() {
    let t = fixture("honeycomb.json").torus(6).unwrap();
    assert!(matches!(t.enumerate_matchings(10), Err(DimerError::TooLarge { cap: 10 })));
}

#[test]
fn height_functions_close_up() {
    for name in ["honeycomb.json", "square_2x2.json", "square_octagon.json"] {
        let t = fixture(name).torus(2).unwrap();
        let base = FaceInstance { face: 0, cell: (0, 0) };
        let reference = t.height_function(&t.reference_matching(), base);
        assert!(reference.values.iter().all(|&v| v == 0));
        for rec in t.enumerate_matchings(DEFAULT_ENUMERATION_CAP).unwrap().iter().take(500) {
            let h = t.height_function(&rec.matching, base);
            assert!(h.consistent, "{name}");
            assert_eq!(h.values[t.face_index(base)], 0);
            let shifted = t.height_function(&rec.matching, FaceInstance { face: 0, cell: (1, 1) });
            let c = shifted.values[0] - h.values[0];
            assert!(shifted.values.iter().zip(&h.values).all(|(a, b)| a - b == c));
        }
    }
}

#[test]
fn height_change_follows_the_translated_face() {
    // h(f + n e_x) - h(f) is the x height change of the torus matching.
    let t = fixture("honeycomb.json").torus(3).unwrap();
    let base = FaceInstance { face: 0, cell: (0, 0) };
    for rec in t.enumerate_matchings(DEFAULT_ENUMERATION_CAP).unwrap().iter().step_by(7) {
        let h = t.height_function(&rec.matching, base);
        let (hx, hy) = rec.height_change;
        assert_eq!(h.at(&t, 0, (3, 0)) - h.at(&t, 0, (0, 0)), hx as i64);
        assert_eq!(h.at(&t, 0, (0, 3)) - h.at(&t, 0, (0, 0)), hy as i64);
    }
}
