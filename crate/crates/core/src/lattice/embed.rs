//! Planar embedding checks and face reconstruction from vertex positions.
//!
//! Dart `2e` runs white to black along edge `e`, dart `2e + 1` runs back.
//! Faces are traced with the face on the left of each dart.

use super::FundamentalDomain;
use crate::error::{DimerError, Result};

const EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dart(pub usize);

impl Dart {
    pub fn edge(self) -> usize {
        self.0 / 2
    }
    pub fn is_forward(self) -> bool {
        self.0 % 2 == 0
    }
    pub fn reverse(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

/// A face of the periodic graph, as a closed walk of darts.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub darts: Vec<usize>,
    /// Cell of each dart's origin, relative to the face's own anchor cell.
    pub cells: Vec<(i32, i32)>,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.darts.len()
    }
}

/// Faces adjacent to an edge. Cells are relative to the white endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceSide {
    pub left: (usize, (i32, i32)),
    pub right: (usize, (i32, i32)),
}

/// Global vertex index of the dart's origin (whites first) and its
/// displacement in cells.
pub(crate) fn dart_origin(d: &FundamentalDomain, dart: usize) -> usize {
    let e = &d.edges[dart / 2];
    if dart % 2 == 0 {
        e.white
    } else {
        d.whites.len() + e.black
    }
}

pub(crate) fn dart_shift(d: &FundamentalDomain, dart: usize) -> (i32, i32) {
    let (dx, dy) = d.edges[dart / 2].offset;
    if dart % 2 == 0 {
        (dx, dy)
    } else {
        (-dx, -dy)
    }
}

fn dart_vector(d: &FundamentalDomain, dart: usize) -> [f64; 2] {
    let e = &d.edges[dart / 2];
    let pw = d.whites[e.white].pos;
    let pb = d.blacks[e.black].pos;
    let v = [pb[0] + e.offset.0 as f64 - pw[0], pb[1] + e.offset.1 as f64 - pw[1]];
    if dart % 2 == 0 {
        v
    } else {
        [-v[0], -v[1]]
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn same_point(a: [f64; 2], b: [f64; 2]) -> bool {
    (a[0] - b[0]).abs() < EPS && (a[1] - b[1]).abs() < EPS
}

fn on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    cross(a, b, p).abs() < EPS
        && p[0] >= a[0].min(b[0]) - EPS
        && p[0] <= a[0].max(b[0]) + EPS
        && p[1] >= a[1].min(b[1]) - EPS
        && p[1] <= a[1].max(b[1]) + EPS
}

/// Rejects lifted drawings in which two edges cross or an edge runs through
/// a vertex it does not end at.
pub(crate) fn check_planarity(d: &FundamentalDomain) -> Result<()> {
    let reach = d.edges.iter().map(|e| e.offset.0.abs().max(e.offset.1.abs())).max().unwrap_or(0) + 1;
    let seg = |i: usize, t: (i32, i32)| {
        let e = &d.edges[i];
        let pw = d.whites[e.white].pos;
        let pb = d.blacks[e.black].pos;
        let a = [pw[0] + t.0 as f64, pw[1] + t.1 as f64];
        let b = [pb[0] + (e.offset.0 + t.0) as f64, pb[1] + (e.offset.1 + t.1) as f64];
        (a, b)
    };
    let mut vertices = Vec::new();
    for tx in -reach..=reach {
        for ty in -reach..=reach {
            for v in d.whites.iter().chain(&d.blacks) {
                vertices.push([v.pos[0] + tx as f64, v.pos[1] + ty as f64]);
            }
        }
    }
    for i in 0..d.edges.len() {
        let (a, b) = seg(i, (0, 0));
        if same_point(a, b) {
            return Err(DimerError::Planarity(format!("edge {i} has zero length")));
        }
        for &p in &vertices {
            if !same_point(p, a) && !same_point(p, b) && on_segment(p, a, b) {
                return Err(DimerError::Planarity(format!("edge {i} passes through a vertex")));
            }
        }
        for j in 0..d.edges.len() {
            for tx in -reach..=reach {
                for ty in -reach..=reach {
                    if j < i || (j == i && (tx, ty) == (0, 0)) {
                        continue;
                    }
                    let (c, e) = seg(j, (tx, ty));
                    let shared = [a, b].iter().any(|&p| same_point(p, c) || same_point(p, e));
                    let d1 = cross(a, b, c);
                    let d2 = cross(a, b, e);
                    let d3 = cross(c, e, a);
                    let d4 = cross(c, e, b);
                    if shared {
                        // Overlap along a common line shows up as parallel darts at the shared vertex.
                        continue;
                    }
                    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                        return Err(DimerError::Planarity(format!("edge {i} crosses a translate of edge {j}")));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Traces all faces using the counterclockwise rotation system at each
/// vertex, and records which face lies on each side of every edge.
pub(crate) fn trace_faces(d: &FundamentalDomain) -> Result<(Vec<Face>, Vec<FaceSide>)> {
    let nv = d.num_vertices();
    let nd = 2 * d.edges.len();
    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for dart in 0..nd {
        rotation[dart_origin(d, dart)].push(dart);
    }
    let mut slot = vec![0usize; nd];
    for list in rotation.iter_mut() {
        let mut keyed: Vec<(f64, usize)> = list
            .iter()
            .map(|&dart| {
                let v = dart_vector(d, dart);
                (v[1].atan2(v[0]), dart)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        for k in 0..keyed.len() {
            let next = keyed[(k + 1) % keyed.len()].0;
            let gap = if k + 1 == keyed.len() { next + 2.0 * std::f64::consts::PI - keyed[k].0 } else { next - keyed[k].0 };
            if keyed.len() > 1 && gap < 1e-9 {
                return Err(DimerError::Planarity("two edges leave a vertex in the same direction".into()));
            }
        }
        *list = keyed.into_iter().map(|(_, dart)| dart).collect();
    }
    for list in &rotation {
        for (k, &dart) in list.iter().enumerate() {
            slot[dart] = k;
        }
    }
    let next_dart = |dart: usize| {
        let r = dart ^ 1;
        let list = &rotation[dart_origin(d, r)];
        list[(slot[r] + list.len() - 1) % list.len()]
    };
    let mut face_of = vec![usize::MAX; nd];
    let mut cell_in_face = vec![(0, 0); nd];
    let mut faces = Vec::new();
    for start in 0..nd {
        if face_of[start] != usize::MAX {
            continue;
        }
        let idx = faces.len();
        let mut darts = Vec::new();
        let mut cells = Vec::new();
        let mut cell = (0, 0);
        let mut dart = start;
        loop {
            if face_of[dart] != usize::MAX {
                return Err(DimerError::Planarity("inconsistent rotation system".into()));
            }
            face_of[dart] = idx;
            cell_in_face[dart] = cell;
            darts.push(dart);
            cells.push(cell);
            let s = dart_shift(d, dart);
            cell = (cell.0 + s.0, cell.1 + s.1);
            dart = next_dart(dart);
            if dart == start {
                break;
            }
        }
        if cell != (0, 0) {
            return Err(DimerError::Planarity(format!("face {idx} wraps around the torus")));
        }
        faces.push(Face { darts, cells });
    }
    let euler = nv as i64 - d.edges.len() as i64 + faces.len() as i64;
    if euler != 0 {
        return Err(DimerError::Planarity(format!("Euler characteristic {euler}, expected 0 for a torus")));
    }
    let sides = (0..d.edges.len())
        .map(|e| {
            let f = 2 * e;
            let b = 2 * e + 1;
            let off = d.edges[e].offset;
            let cf = cell_in_face[f];
            let cb = cell_in_face[b];
            FaceSide {
                left: (face_of[f], (-cf.0, -cf.1)),
                right: (face_of[b], (off.0 - cb.0, off.1 - cb.1)),
            }
        })
        .collect();
    Ok((faces, sides))
}
