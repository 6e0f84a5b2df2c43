//! Newton polygons: convex hulls of exponent sets with lattice point census.

use num_integer::gcd;
use serde::Serialize;

use crate::poly::LaurentPoly2;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    /// Hull vertices in counterclockwise order, starting from the lowest-left.
    pub vertices: Vec<(i32, i32)>,
    pub interior: Vec<(i32, i32)>,
    pub boundary: Vec<(i32, i32)>,
}

fn cross(o: (i32, i32), a: (i32, i32), b: (i32, i32)) -> i64 {
    (a.0 - o.0) as i64 * (b.1 - o.1) as i64 - (a.1 - o.1) as i64 * (b.0 - o.0) as i64
}

/// Convex hull by the monotone chain, collinear points dropped.
pub fn convex_hull(points: &[(i32, i32)]) -> Vec<(i32, i32)> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i32, i32)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i32, i32)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl NewtonPolygon {
    pub fn from_points(points: &[(i32, i32)]) -> Self {
        let vertices = convex_hull(points);
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        if let (Some(xmin), Some(xmax), Some(ymin), Some(ymax)) = (
            vertices.iter().map(|p| p.0).min(),
            vertices.iter().map(|p| p.0).max(),
            vertices.iter().map(|p| p.1).min(),
            vertices.iter().map(|p| p.1).max(),
        ) {
            for y in ymin..=ymax {
                for x in xmin..=xmax {
                    match Self::classify(&vertices, (x, y)) {
                        Location::Interior => interior.push((x, y)),
                        Location::Boundary => boundary.push((x, y)),
                        Location::Outside => {}
                    }
                }
            }
        }
        Self { vertices, interior, boundary }
    }

    fn classify(vertices: &[(i32, i32)], p: (i32, i32)) -> Location {
        match vertices.len() {
            0 => Location::Outside,
            1 => {
                if p == vertices[0] {
                    Location::Boundary
                } else {
                    Location::Outside
                }
            }
            2 => {
                let (a, b) = (vertices[0], vertices[1]);
                let within = p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1);
                if cross(a, b, p) == 0 && within {
                    Location::Boundary
                } else {
                    Location::Outside
                }
            }
            n => {
                let mut on_edge = false;
                for i in 0..n {
                    let c = cross(vertices[i], vertices[(i + 1) % n], p);
                    if c < 0 {
                        return Location::Outside;
                    }
                    if c == 0 {
                        on_edge = true;
                    }
                }
                if on_edge {
                    Location::Boundary
                } else {
                    Location::Interior
                }
            }
        }
    }

    pub fn contains_lattice_point(&self, p: (i32, i32)) -> bool {
        !matches!(Self::classify(&self.vertices, p), Location::Outside)
    }

    pub fn is_interior_lattice_point(&self, p: (i32, i32)) -> bool {
        matches!(Self::classify(&self.vertices, p), Location::Interior)
    }

    /// Whether a real point lies in the closed polygon, up to `tol`.
    pub fn contains(&self, s: f64, t: f64, tol: f64) -> bool {
        let v = &self.vertices;
        match v.len() {
            0 => false,
            1 => (s - v[0].0 as f64).abs() <= tol && (t - v[0].1 as f64).abs() <= tol,
            2 => {
                let (ax, ay) = (v[0].0 as f64, v[0].1 as f64);
                let (bx, by) = (v[1].0 as f64, v[1].1 as f64);
                let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
                let u = ((s - ax) * (bx - ax) + (t - ay) * (by - ay)) / (len * len);
                let dist = ((bx - ax) * (t - ay) - (by - ay) * (s - ax)).abs() / len;
                dist <= tol && (-tol..=1.0 + tol).contains(&u)
            }
            n => (0..n).all(|i| {
                let (ax, ay) = (v[i].0 as f64, v[i].1 as f64);
                let (bx, by) = (v[(i + 1) % n].0 as f64, v[(i + 1) % n].1 as f64);
                let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
                ((bx - ax) * (t - ay) - (by - ay) * (s - ax)) / len >= -tol
            }),
        }
    }

    /// Polygon area by the shoelace formula.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let twice: i64 = (0..v.len()).map(|i| cross((0, 0), v[i], v[(i + 1) % v.len()])).sum();
        twice as f64 / 2.0
    }

    pub fn lattice_point_count(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    /// Lattice points in hull order around the boundary, including those on
    /// edges between vertices.
    pub fn boundary_cycle(&self) -> Vec<(i32, i32)> {
        let v = &self.vertices;
        if v.len() < 2 {
            return v.clone();
        }
        let mut out = Vec::new();
        for i in 0..v.len() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            let g = gcd(b.0 - a.0, b.1 - a.1).max(1);
            let step = ((b.0 - a.0) / g, (b.1 - a.1) / g);
            for k in 0..g {
                out.push((a.0 + k * step.0, a.1 + k * step.1));
            }
            if v.len() == 2 {
                out.push(b);
                break;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Location {
    Interior,
    Boundary,
    Outside,
}


/// Newton polygon of the exponent support of `p`.
pub fn newton_polygon<T: Scalar>(p: &LaurentPoly2<T>) -> NewtonPolygon {
    NewtonPolygon::from_points(&p.support())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diamond_census() {
        let n = NewtonPolygon::from_points(&[(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]);
        assert_eq!(n.vertices.len(), 4);
        assert_eq!(n.interior, vec![(0, 0)]);
        assert_eq!(n.boundary.len(), 4);
        assert_eq!(n.area(), 2.0);
    }

    #[test]
    fn degenerate_polygons() {
        let p = NewtonPolygon::from_points(&[(3, 4)]);
        assert_eq!(p.vertices, vec![(3, 4)]);
        assert_eq!(p.area(), 0.0);
        assert_eq!(p.boundary, vec![(3, 4)]);
        let s = NewtonPolygon::from_points(&[(0, 0), (2, 2), (1, 1)]);
        assert_eq!(s.vertices, vec![(0, 0), (2, 2)]);
        assert_eq!(s.boundary.len(), 3);
    }

    proptest! {
        #[test]
        fn pick_theorem_holds(pts in proptest::collection::vec((-6i32..=6, -6i32..=6), 3..12)) {
            let n = NewtonPolygon::from_points(&pts);
            prop_assume!(n.vertices.len() >= 3);
            let pick = n.interior.len() as f64 + n.boundary.len() as f64 / 2.0 - 1.0;
            prop_assert_eq!(pick, n.area());
            for p in &pts {
                prop_assert!(n.contains_lattice_point(*p));
            }
            prop_assert_eq!(n.boundary_cycle().len(), n.boundary.len());
        }
    }
}
