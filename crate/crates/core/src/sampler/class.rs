//! Starting matchings in a prescribed height-change class.

use std::collections::BTreeMap;

use crate::error::{DimerError, Result};
use crate::lattice::{FaceInstance, Matching, TorusGraph};

/// Periodic extension to `G_n` of a matching of `G_1` given by base edges.
fn periodic(torus: &TorusGraph, base_edges: &[usize]) -> Matching {
    let n = torus.n;
    let mut by_white = vec![0; torus.num_whites()];
    for cy in 0..n {
        for cx in 0..n {
            for (w, &e) in base_edges.iter().enumerate() {
                by_white[torus.white_instance(w, (cx, cy))] = torus.edge_instance(e, (cx, cy));
            }
        }
    }
    Matching { by_white }
}

/// One `G_1` matching per height change, lowest energy first.
fn unit_matchings(torus: &TorusGraph) -> Result<BTreeMap<(i32, i32), Vec<usize>>> {
    let g1 = torus.base.torus(1)?;
    let mut out: BTreeMap<(i32, i32), (f64, Vec<usize>)> = BTreeMap::new();
    for rec in g1.enumerate_matchings(200_000)? {
        let edges: Vec<usize> = rec.matching.by_white.iter().map(|&i| g1.edge(i).base).collect();
        let slot = out.entry(rec.height_change).or_insert((f64::INFINITY, Vec::new()));
        if rec.energy < slot.0 {
            *slot = (rec.energy, edges);
        }
    }
    Ok(out.into_iter().map(|(k, (_, e))| (k, e)).collect())
}

/// The periodic matching whose height change per period maximizes
/// `direction · H` among `G_1` matchings.
pub fn corner_matching(torus: &TorusGraph, direction: (f64, f64)) -> Result<Matching> {
    let units = unit_matchings(torus)?;
    let (_, edges) = units
        .iter()
        .max_by(|a, b| {
            let fa = direction.0 * a.0 .0 as f64 + direction.1 * a.0 .1 as f64;
            let fb = direction.0 * b.0 .0 as f64 + direction.1 * b.0 .1 as f64;
            fa.total_cmp(&fb)
        })
        .ok_or_else(|| DimerError::InvalidArgument("no matching of G_1".into()))?;
    Ok(periodic(torus, edges))
}

/// A perfect matching of `torus` with height change `target` per period.
///
/// A matching is the same thing as an integer height function on the faces
/// of the lift with flux `M(e) - M0(e) ∈ {-M0(e), 1 - M0(e)}` across every
/// edge, and the height change fixes its periods. Those are difference
/// constraints, solved by Bellman-Ford; a negative cycle means the class is
/// empty.
pub fn matching_in_class(torus: &TorusGraph, target: (i32, i32)) -> Result<Matching> {
    let nf = torus.num_faces();
    let reference = torus.reference_matching();
    let shift = |q: (i64, i64)| q.0 * target.0 as i64 + q.1 * target.1 as i64;
    // Constraint v[to] <= v[from] + length, with the face pair of each edge.
    let mut arcs: Vec<(usize, usize, i64)> = Vec::with_capacity(2 * torus.num_edges());
    let mut sides = Vec::with_capacity(torus.num_edges());
    for ei in 0..torus.num_edges() {
        let ((fl, cl), (fr, cr)) = torus.edge_faces(ei);
        let (l0, ql) = torus.reduce_cell(cl);
        let (r0, qr) = torus.reduce_cell(cr);
        let li = torus.face_index(FaceInstance { face: fl, cell: l0 });
        let ri = torus.face_index(FaceInstance { face: fr, cell: r0 });
        let s = shift((qr.0 - ql.0, qr.1 - ql.1));
        let omega = i64::from(reference.contains(torus, ei));
        // h(right) = h(left) + flux, with h(g + n q) = h(g) + q · H.
        arcs.push((li, ri, 1 - omega - s));
        arcs.push((ri, li, omega + s));
        sides.push((li, ri, s, omega));
    }
    let mut v = vec![0i64; nf];
    let mut settled = false;
    for _ in 0..=nf {
        let mut changed = false;
        for &(from, to, len) in &arcs {
            if v[from] + len < v[to] {
                v[to] = v[from] + len;
                changed = true;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(DimerError::InvalidArgument(format!(
            "no matching of G_{} has height change {target:?}",
            torus.n
        )));
    }
    let mut by_white = vec![usize::MAX; torus.num_whites()];
    for (ei, &(li, ri, s, omega)) in sides.iter().enumerate() {
        if v[ri] - v[li] + s + omega == 1 {
            by_white[torus.edge(ei).white] = ei;
        }
    }
    let m = Matching { by_white };
    debug_assert!(torus.is_perfect_matching(&m) && torus.height_change(&m) == target);
    Ok(m)
}
