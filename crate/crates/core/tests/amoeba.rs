mod common;

use common::{fixture, ALL_FIXTURES};
use dimer_core::amoeba::{
    amoeba_area, amoeba_contains, amoeba_grid, phase_of, ronkin, ronkin_gradient, suggest_window, torus_roots, ComponentKind,
    Phase, RonkinGrid, Window,
};
use dimer_core::charpoly::characteristic_polynomial;
use dimer_core::newton::newton_polygon;
use dimer_core::FloatPoly;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(name: &str) -> FloatPoly {
    characteristic_polynomial(&fixture(name)).unwrap().pruned(1e-9)
}

#[test]
fn component_census() {
    let cases = [("square_4x4_weighted.json", 5, 2, 4), ("square_octagon.json", 1, 0, 4), ("square_2x2.json", 0, 0, 4)];
    for (name, bounded, semi, unbounded) in cases {
        let p = poly(name);
        let d = amoeba_grid(&p, suggest_window(&p), 400).unwrap();
        let counts = (d.count(ComponentKind::Bounded), d.count(ComponentKind::SemiBounded), d.count(ComponentKind::Unbounded));
        assert_eq!(counts, (bounded, semi, unbounded), "{name}");
        let newton = newton_polygon(&p);
        for c in &d.components {
            assert_eq!(c.kind == ComponentKind::Bounded, newton.is_interior_lattice_point(c.slope), "{name} {c:?}");
            assert!(c.slope_residual < 1e-6);
        }
    }
}

#[test]
fn complement_components_are_convex() {
    let p = poly("square_octagon.json");
    let d = amoeba_grid(&p, Window::square(4.0), 160).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for c in &d.components {
        let cells = d.cells_of(c.id);
        for _ in 0..400 {
            let a = cells[rng.random_range(0..cells.len())];
            let b = cells[rng.random_range(0..cells.len())];
            let (mx, my) = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
            let near = (mx.saturating_sub(1)..=(mx + 1).min(d.nx - 1))
                .any(|x| (my.saturating_sub(1)..=(my + 1).min(d.ny - 1)).any(|y| d.label(x, y) == c.id as i32));
            assert!(near, "component {} not convex between {a:?} and {b:?}", c.id);
        }
    }
}

#[test]
fn membership_agrees_with_torus_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ALL_FIXTURES {
        let p = poly(name);
        let w = suggest_window(&p).scaled(0.5);
        let mut checked = 0;
        while checked < 100 {
            let x = rng.random_range(w.xmin..w.xmax);
            let y = rng.random_range(w.ymin..w.ymax);
            let m = amoeba_contains(&p, x, y);
            if m.margin.abs() < 1e-6 {
                continue;
            }
            assert_eq!(m.inside, !torus_roots(&p, x, y).is_empty(), "{name} at ({x}, {y})");
            checked += 1;
        }
    }
}

#[test]
fn ronkin_is_affine_on_components() {
    let p = poly("square_4x4_weighted.json");
    let d = amoeba_grid(&p, suggest_window(&p), 200).unwrap();
    for c in &d.components {
        let (x0, y0) = c.representative;
        let (s, t) = (c.slope.0 as f64, c.slope.1 as f64);
        let base = ronkin(&p, x0, y0).unwrap() - s * x0 - t * y0;
        let cells = d.cells_of(c.id);
        for &(ix, iy) in cells.iter().step_by((cells.len() / 5).max(1)) {
            let (x, y) = d.window.cell_center(d.nx, d.ny, ix, iy);
            if amoeba_contains(&p, x, y).margin < 1e-3 {
                continue;
            }
            let f = ronkin(&p, x, y).unwrap() - s * x - t * y;
            assert!((f - base).abs() < 1e-6, "component {} at ({x}, {y}): {f} vs {base}", c.id);
        }
    }
}

#[test]
fn ronkin_grid_is_convex_with_gradient_in_polygon() {
    let p = poly("square_octagon.json");
    let newton = newton_polygon(&p);
    let g = RonkinGrid::compute(&p, Window::square(3.0), 25, 25, 1e-11).unwrap();
    for iy in 1..24 {
        for ix in 1..24 {
            // Second differences along axes and diagonals.
            for (dx, dy) in [(1, 0), (0, 1), (1, 1), (1, -1)] {
                let a = g.at((ix as i32 - dx) as usize, (iy as i32 - dy) as usize);
                let b = g.at((ix as i32 + dx) as usize, (iy as i32 + dy) as usize);
                assert!(a + b - 2.0 * g.at(ix, iy) > -1e-9);
            }
            let (gx, gy) = ronkin_gradient(&p, g.xs[ix], g.ys[iy]);
            assert!(newton.contains(gx, gy, 1e-9));
        }
    }
}

#[test]
fn phase_examples() {
    let p = poly("square_octagon.json");
    assert_eq!(phase_of(&p, 0.0, 0.0).unwrap().phase, Phase::Gaseous);
    assert_eq!(phase_of(&p, 0.1, 0.05).unwrap().phase, Phase::Gaseous);
    assert_eq!(phase_of(&p, 1.2, 0.3).unwrap().phase, Phase::Liquid);
    let frozen = phase_of(&p, 10.0, 0.0).unwrap();
    assert_eq!(frozen.phase, Phase::Frozen);
    assert_eq!(frozen.lattice_slope, Some((1, 0)));
}

#[test]
fn torus_root_examples() {
    let node = poly("square_2x2.json");
    let r = torus_roots(&node, 0.0, 0.0);
    assert_eq!(r.len(), 1);
    let root = r.roots[0];
    assert!(root.node && root.alpha.norm() < 1e-12 && root.beta.norm() < 1e-12);
    assert!((root.z - Complex64::new(1.0, 0.0)).norm() < 1e-12 && (root.w - Complex64::new(1.0, 0.0)).norm() < 1e-12);

    let p = poly("square_octagon.json");
    assert!(torus_roots(&p, 0.0, 0.0).is_empty());
    let r = torus_roots(&p, 1.2, 0.3);
    assert_eq!(r.len(), 2);
    assert!((r.roots[0].z - r.roots[1].z.conj()).norm() < 1e-9);
    assert!((r.roots[0].w - r.roots[1].w.conj()).norm() < 1e-9);
    for root in &r.roots {
        let v = p.eval_complex(root.z * 1.2f64.exp(), root.w * 0.3f64.exp());
        assert!(v.norm() < 1e-9);
    }
}

#[test]
fn area_is_pi_squared_times_polygon_area() {
    for name in ["square_octagon.json", "honeycomb.json", "square_2x2.json"] {
        let p = poly(name);
        let expected = std::f64::consts::PI.powi(2) * newton_polygon(&p).area();
        let a = amoeba_area(&p, suggest_window(&p).scaled(2.0), 1000, 3);
        assert!((a.area - expected).abs() < 0.01 * expected, "{name}: {} vs {expected}", a.area);
    }
}
