//! Torus quotients `G_n`, perfect matchings on them and height functions.

use std::collections::VecDeque;

use super::FundamentalDomain;
use crate::error::{DimerError, Result};

pub const DEFAULT_ENUMERATION_CAP: usize = 10_000_000;

/// One lifted copy of a base edge. The white endpoint sits in `cell`; the
/// black endpoint in `cell + offset` reduced mod `n`, with `wrap` recording
/// how many times the reduction crossed the torus in each direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeInstance {
    pub base: usize,
    pub cell: (usize, usize),
    pub white: usize,
    pub black: usize,
    pub wrap: (i32, i32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceInstance {
    pub face: usize,
    pub cell: (usize, usize),
}

/// The `n x n` quotient of the periodic graph.
#[derive(Clone, Debug)]
pub struct TorusGraph {
    pub n: usize,
    pub base: FundamentalDomain,
    edges: Vec<EdgeInstance>,
    white_adj: Vec<Vec<usize>>,
    black_adj: Vec<Vec<usize>>,
    reference: Vec<usize>,
}

/// A perfect matching stored as `white instance -> edge instance`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    pub by_white: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MatchingRecord {
    pub matching: Matching,
    pub energy: f64,
    pub height_change: (i32, i32),
}

impl TorusGraph {
    pub fn new(base: FundamentalDomain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(DimerError::InvalidArgument("torus size must be at least 1".into()));
        }
        let nw = base.whites.len();
        let nb = base.blacks.len();
        let ne = base.edges.len();
        let mut edges = Vec::with_capacity(n * n * ne);
        let mut white_adj = vec![Vec::new(); n * n * nw];
        let mut black_adj = vec![Vec::new(); n * n * nb];
        let ni = n as i32;
        for cy in 0..n {
            for cx in 0..n {
                for (ei, e) in base.edges.iter().enumerate() {
                    let bx = cx as i32 + e.offset.0;
                    let by = cy as i32 + e.offset.1;
                    let bcell = (bx.rem_euclid(ni) as usize, by.rem_euclid(ni) as usize);
                    let inst = EdgeInstance {
                        base: ei,
                        cell: (cx, cy),
                        white: (cy * n + cx) * nw + e.white,
                        black: (bcell.1 * n + bcell.0) * nb + e.black,
                        wrap: (bx.div_euclid(ni), by.div_euclid(ni)),
                    };
                    white_adj[inst.white].push(edges.len());
                    black_adj[inst.black].push(edges.len());
                    edges.push(inst);
                }
            }
        }
        let reference = base.reference_matching();
        Ok(Self { n, base, edges, white_adj, black_adj, reference })
    }

    pub fn num_whites(&self) -> usize {
        self.white_adj.len()
    }

    pub fn num_blacks(&self) -> usize {
        self.black_adj.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_whites() + self.num_blacks()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.n * self.n * self.base.faces.len()
    }

    pub fn edges(&self) -> &[EdgeInstance] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &EdgeInstance {
        &self.edges[i]
    }

    pub fn white_edges(&self, w: usize) -> &[usize] {
        &self.white_adj[w]
    }

    pub fn black_edges(&self, b: usize) -> &[usize] {
        &self.black_adj[b]
    }

    pub fn cell_index(&self, cell: (usize, usize)) -> usize {
        cell.1 * self.n + cell.0
    }

    /// Edge instance of base edge `e` whose white endpoint lies in `cell`.
    pub fn edge_instance(&self, e: usize, cell: (usize, usize)) -> usize {
        self.cell_index(cell) * self.base.edges.len() + e
    }

    pub fn white_instance(&self, w: usize, cell: (usize, usize)) -> usize {
        self.cell_index(cell) * self.base.whites.len() + w
    }

    pub fn black_instance(&self, b: usize, cell: (usize, usize)) -> usize {
        self.cell_index(cell) * self.base.blacks.len() + b
    }

    pub fn face_index(&self, f: FaceInstance) -> usize {
        self.cell_index(f.cell) * self.base.faces.len() + f.face
    }

    pub fn face_instance(&self, idx: usize) -> FaceInstance {
        let nf = self.base.faces.len();
        let ci = idx / nf;
        FaceInstance { face: idx % nf, cell: (ci % self.n, ci / self.n) }
    }

    /// Reduces a lifted cell to the torus, returning the wrap count.
    pub fn reduce_cell(&self, c: (i64, i64)) -> ((usize, usize), (i64, i64)) {
        let n = self.n as i64;
        ((c.0.rem_euclid(n) as usize, c.1.rem_euclid(n) as usize), (c.0.div_euclid(n), c.1.div_euclid(n)))
    }

    /// Lifted face instances on the left and right of an edge instance, as
    /// `(face, lifted cell)`.
    pub fn edge_faces(&self, ei: usize) -> ((usize, (i64, i64)), (usize, (i64, i64))) {
        let inst = &self.edges[ei];
        let side = self.base.sides[inst.base];
        let w = (inst.cell.0 as i64, inst.cell.1 as i64);
        let lift = |(f, (dx, dy)): (usize, (i32, i32))| (f, (w.0 + dx as i64, w.1 + dy as i64));
        (lift(side.left), lift(side.right))
    }

    /// The periodic extension of the base reference matching.
    pub fn reference_matching(&self) -> Matching {
        let n = self.n;
        let mut by_white = vec![0; self.num_whites()];
        for cy in 0..n {
            for cx in 0..n {
                for (w, &e) in self.reference.iter().enumerate() {
                    by_white[self.white_instance(w, (cx, cy))] = self.edge_instance(e, (cx, cy));
                }
            }
        }
        Matching { by_white }
    }

    pub fn base_reference(&self) -> &[usize] {
        &self.reference
    }

    pub fn energy(&self, m: &Matching) -> f64 {
        m.by_white.iter().map(|&e| self.base.edges[self.edges[e].base].energy).sum()
    }

    /// Height change of `m` against the reference matching, per period of the
    /// torus.
    pub fn height_change(&self, m: &Matching) -> (i32, i32) {
        let mut total = (0i64, 0i64);
        for (w, &e) in m.by_white.iter().enumerate() {
            let a = self.base.edges[self.edges[e].base].height_vector();
            let r = self.base.edges[self.reference[w % self.base.whites.len()]].height_vector();
            total.0 += (a.0 - r.0) as i64;
            total.1 += (a.1 - r.1) as i64;
        }
        let n = self.n as i64;
        debug_assert!(total.0 % n == 0 && total.1 % n == 0);
        ((total.0 / n) as i32, (total.1 / n) as i32)
    }

    /// Checks that every white and black vertex is covered exactly once.
    pub fn is_perfect_matching(&self, m: &Matching) -> bool {
        if m.by_white.len() != self.num_whites() {
            return false;
        }
        let mut covered = vec![false; self.num_blacks()];
        for (w, &e) in m.by_white.iter().enumerate() {
            let Some(inst) = self.edges.get(e) else { return false };
            if inst.white != w || covered[inst.black] {
                return false;
            }
            covered[inst.black] = true;
        }
        true
    }

    /// All perfect matchings in depth-first order over white vertices, or an
    /// error once more than `cap` have been found.
    pub fn enumerate_matchings(&self, cap: usize) -> Result<Vec<MatchingRecord>> {
        let nw = self.num_whites();
        let mut used = vec![false; self.num_blacks()];
        let mut current = vec![usize::MAX; nw];
        let mut out = Vec::new();
        self.enumerate_rec(0, &mut used, &mut current, &mut out, cap)?;
        Ok(out)
    }

    fn enumerate_rec(
        &self,
        w: usize,
        used: &mut [bool],
        current: &mut [usize],
        out: &mut Vec<MatchingRecord>,
        cap: usize,
    ) -> Result<()> {
        if w == current.len() {
            if out.len() >= cap {
                return Err(DimerError::TooLarge { cap });
            }
            let matching = Matching { by_white: current.to_vec() };
            let energy = self.energy(&matching);
            let height_change = self.height_change(&matching);
            out.push(MatchingRecord { matching, energy, height_change });
            return Ok(());
        }
        for &e in &self.white_adj[w] {
            let b = self.edges[e].black;
            if used[b] {
                continue;
            }
            used[b] = true;
            current[w] = e;
            let r = self.enumerate_rec(w + 1, used, current, out, cap);
            used[b] = false;
            r?;
        }
        Ok(())
    }

    /// Height function of `m` relative to the reference matching, zero at
    /// `base_face`.
    pub fn height_function(&self, m: &Matching, base_face: FaceInstance) -> HeightFunction {
        let flow = self.flow(m);
        let hc = self.height_change(m);
        let nf = self.num_faces();
        let mut adj: Vec<Vec<(usize, i64, (i64, i64))>> = vec![Vec::new(); nf];
        for ei in 0..self.edges.len() {
            let ((fl, cl), (fr, cr)) = self.edge_faces(ei);
            let (l0, ql) = self.reduce_cell(cl);
            let (r0, qr) = self.reduce_cell(cr);
            let li = self.face_index(FaceInstance { face: fl, cell: l0 });
            let ri = self.face_index(FaceInstance { face: fr, cell: r0 });
            let q = (qr.0 - ql.0, qr.1 - ql.1);
            adj[li].push((ri, flow[ei], q));
            adj[ri].push((li, -flow[ei], (-q.0, -q.1)));
        }
        let h = (hc.0 as i64, hc.1 as i64);
        let mut values = vec![i64::MIN; nf];
        let start = self.face_index(base_face);
        values[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            for &(g, delta, q) in &adj[f] {
                // h(g + n q) = h(f) + delta, and h(g + n q) = h(g) + q . H.
                let v = values[f] + delta - (q.0 * h.0 + q.1 * h.1);
                if values[g] == i64::MIN {
                    values[g] = v;
                    queue.push_back(g);
                }
            }
        }
        let consistent = (0..nf).all(|f| {
            adj[f].iter().all(|&(g, delta, q)| values[g] == values[f] + delta - (q.0 * h.0 + q.1 * h.1))
        });
        HeightFunction { base_face, values, height_change: hc, consistent }
    }

    /// `M(e) - M0(e)` for every edge instance.
    pub fn flow(&self, m: &Matching) -> Vec<i64> {
        let mut flow = vec![0i64; self.edges.len()];
        for &e in &m.by_white {
            flow[e] += 1;
        }
        for &e in &self.reference_matching().by_white {
            flow[e] -= 1;
        }
        flow
    }
}

impl Matching {
    pub fn edges(&self) -> &[usize] {
        &self.by_white
    }

    pub fn contains(&self, torus: &TorusGraph, e: usize) -> bool {
        self.by_white[torus.edge(e).white] == e
    }
}

/// Integer heights on the face instances of a torus, relative to the
/// reference matching. Values are those of the lift whose faces sit in cells
/// `[0, n)^2`; other lifts differ by multiples of the height change.
#[derive(Clone, Debug)]
pub struct HeightFunction {
    pub base_face: FaceInstance,
    pub values: Vec<i64>,
    pub height_change: (i32, i32),
    /// Whether every dual edge reproduced its flux increment.
    pub consistent: bool,
}

impl HeightFunction {
    /// Height at a face instance given by lifted cell coordinates.
    pub fn at(&self, torus: &TorusGraph, face: usize, cell: (i64, i64)) -> i64 {
        let (c, q) = torus.reduce_cell(cell);
        self.values[torus.face_index(FaceInstance { face, cell: c })]
            + q.0 * self.height_change.0 as i64
            + q.1 * self.height_change.1 as i64
    }
}
