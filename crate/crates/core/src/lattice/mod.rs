//! Periodic bipartite planar graphs given by a fundamental domain, their
//! torus quotients, perfect matchings and height functions.
//!
//! Edge offsets `(dx, dy)` locate the black endpoint's cell relative to the
//! white endpoint's cell. A unit white-to-black flow along an edge crosses
//! horizontal cell boundaries `dy` times and vertical ones `dx` times, so the
//! height change it induces is `(dy, -dx)`. Heights increase by one when
//! stepping from the face left of a white-to-black edge to the face on its
//! right, weighted by `M(e) - M0(e)`.

mod assignment;
mod embed;
mod torus;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use assignment::min_cost_assignment;
pub use embed::{Dart, Face, FaceSide};
pub use torus::{EdgeInstance, FaceInstance, HeightFunction, Matching, MatchingRecord, TorusGraph, DEFAULT_ENUMERATION_CAP};

use crate::error::{DimerError, Result};
use crate::scalar::{parse_rational, recognize_rational, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub pos: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub white: usize,
    pub black: usize,
    pub energy: f64,
    /// `e^{-energy}`.
    pub weight: f64,
    /// Exact weight when the energy is `-log` of a recognizable rational or
    /// an explicit `weight` was supplied.
    pub exact_weight: Option<Rational>,
    pub offset: (i32, i32),
}

impl Edge {
    /// Height change contributed by a unit white-to-black flow.
    pub fn height_vector(&self) -> (i32, i32) {
        (self.offset.1, -self.offset.0)
    }
}

/// Largest denominator accepted when recognizing `e^{-energy}` as rational.
const MAX_WEIGHT_DENOMINATOR: i64 = 1000;

/// One period cell of a doubly periodic bipartite planar graph.
#[derive(Clone, Debug)]
pub struct FundamentalDomain {
    pub whites: Vec<Vertex>,
    pub blacks: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    /// Faces on either side of each edge, indexed like `edges`.
    pub sides: Vec<FaceSide>,
    white_edges: Vec<Vec<usize>>,
    black_edges: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawVertex {
    id: Value,
    pos: [f64; 2],
}

#[derive(Deserialize)]
struct RawEdge {
    white: Value,
    black: Value,
    #[serde(default)]
    energy: Option<f64>,
    #[serde(default)]
    weight: Option<Value>,
    offset: [i32; 2],
}

#[derive(Deserialize)]
struct RawDomain {
    whites: Vec<RawVertex>,
    blacks: Vec<RawVertex>,
    edges: Vec<RawEdge>,
}

fn id_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(DimerError::Schema(format!("vertex id must be a string or number, got {v}"))),
    }
}

/// Input description of an edge for [`FundamentalDomain::from_parts`].
#[derive(Clone, Debug)]
pub struct EdgeSpec {
    pub white: usize,
    pub black: usize,
    pub energy: f64,
    pub exact_weight: Option<Rational>,
    pub offset: (i32, i32),
}

impl EdgeSpec {
    pub fn new(white: usize, black: usize, energy: f64, offset: (i32, i32)) -> Self {
        Self { white, black, energy, exact_weight: None, offset }
    }
}

/// Parses a graph description, see [`FundamentalDomain`] for validation.
pub fn parse_domain(text: &str) -> Result<FundamentalDomain> {
    let raw: RawDomain = serde_json::from_str(text).map_err(|e| DimerError::Schema(e.to_string()))?;
    let mut white_ids = HashMap::new();
    let mut black_ids = HashMap::new();
    let mut whites = Vec::new();
    let mut blacks = Vec::new();
    for (list, ids, out) in [(&raw.whites, &mut white_ids, &mut whites), (&raw.blacks, &mut black_ids, &mut blacks)] {
        for v in list {
            let id = id_text(&v.id)?;
            if ids.insert(id.clone(), out.len()).is_some() {
                return Err(DimerError::Schema(format!("duplicate vertex id '{id}'")));
            }
            out.push(Vertex { id, pos: v.pos });
        }
    }
    for id in white_ids.keys() {
        if black_ids.contains_key(id) {
            return Err(DimerError::Schema(format!("id '{id}' used for both a white and a black vertex")));
        }
    }
    let mut edges = Vec::new();
    for (idx, e) in raw.edges.iter().enumerate() {
        let w = id_text(&e.white)?;
        let b = id_text(&e.black)?;
        let white = match (white_ids.get(&w), black_ids.get(&w)) {
            (Some(&i), _) => i,
            (None, Some(_)) => {
                return Err(DimerError::NonBipartite(format!("edge {idx}: '{w}' in the white slot is black")))
            }
            _ => return Err(DimerError::Schema(format!("edge {idx}: unknown vertex '{w}'"))),
        };
        let black = match (black_ids.get(&b), white_ids.get(&b)) {
            (Some(&i), _) => i,
            (None, Some(_)) => {
                return Err(DimerError::NonBipartite(format!("edge {idx}: '{w}'-'{b}' joins two white vertices")))
            }
            _ => return Err(DimerError::Schema(format!("edge {idx}: unknown vertex '{b}'"))),
        };
        let exact = match &e.weight {
            None => None,
            Some(v) => {
                let text = match v {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(DimerError::Schema(format!("edge {idx}: weight must be a string or number"))),
                };
                let r = parse_rational(&text)
                    .ok_or_else(|| DimerError::Schema(format!("edge {idx}: weight '{text}' is not a rational")))?;
                if r <= Rational::from_integer(0.into()) {
                    return Err(DimerError::Schema(format!("edge {idx}: weight must be positive")));
                }
                Some(r)
            }
        };
        let energy = match (e.energy, &exact) {
            (Some(en), _) => en,
            (None, Some(r)) => -crate::scalar::rational_to_f64(r).ln(),
            (None, None) => 0.0,
        };
        edges.push(EdgeSpec { white, black, energy, exact_weight: exact, offset: (e.offset[0], e.offset[1]) });
    }
    FundamentalDomain::from_parts(whites, blacks, edges)
}

impl FundamentalDomain {
    /// Builds and validates a domain: positions, bipartite endpoints,
    /// planarity of the lifted drawing, connectivity and existence of a
    /// perfect matching.
    pub fn from_parts(whites: Vec<Vertex>, blacks: Vec<Vertex>, specs: Vec<EdgeSpec>) -> Result<Self> {
        if whites.is_empty() || blacks.is_empty() {
            return Err(DimerError::Schema("need at least one white and one black vertex".into()));
        }
        for v in whites.iter().chain(&blacks) {
            if !v.pos.iter().all(|c| (0.0..1.0).contains(c)) {
                return Err(DimerError::Schema(format!("vertex '{}' position {:?} outside [0,1)^2", v.id, v.pos)));
            }
        }
        let mut edges = Vec::with_capacity(specs.len());
        for (i, s) in specs.into_iter().enumerate() {
            if s.white >= whites.len() || s.black >= blacks.len() {
                return Err(DimerError::Schema(format!("edge {i}: vertex index out of range")));
            }
            if !s.energy.is_finite() {
                return Err(DimerError::Schema(format!("edge {i}: energy must be finite")));
            }
            let weight = (-s.energy).exp();
            let exact_weight = s.exact_weight.or_else(|| {
                if s.energy == 0.0 {
                    Some(Rational::from_integer(1.into()))
                } else {
                    recognize_rational(weight, MAX_WEIGHT_DENOMINATOR, 1e-12)
                }
            });
            edges.push(Edge { white: s.white, black: s.black, energy: s.energy, weight, exact_weight, offset: s.offset });
        }
        let mut white_edges = vec![Vec::new(); whites.len()];
        let mut black_edges = vec![Vec::new(); blacks.len()];
        for (i, e) in edges.iter().enumerate() {
            white_edges[e.white].push(i);
            black_edges[e.black].push(i);
        }
        for (list, verts) in [(&white_edges, &whites), (&black_edges, &blacks)] {
            if let Some(i) = list.iter().position(Vec::is_empty) {
                return Err(DimerError::Schema(format!("vertex '{}' has degree 0", verts[i].id)));
            }
        }
        let mut domain = Self { whites, blacks, edges, faces: Vec::new(), sides: Vec::new(), white_edges, black_edges };
        embed::check_planarity(&domain)?;
        let (faces, sides) = embed::trace_faces(&domain)?;
        domain.faces = faces;
        domain.sides = sides;
        domain.check_connected()?;
        if domain.whites.len() != domain.blacks.len() {
            return Err(DimerError::NoPerfectMatching(format!(
                "{} white vs {} black vertices",
                domain.whites.len(),
                domain.blacks.len()
            )));
        }
        domain.min_energy_matching(&[], &[]).ok_or_else(|| DimerError::NoPerfectMatching("G1 has none".into()))?;
        Ok(domain)
    }

    pub fn num_vertices(&self) -> usize {
        self.whites.len() + self.blacks.len()
    }

    /// Number of whites (equal to the number of blacks).
    pub fn size(&self) -> usize {
        self.whites.len()
    }

    pub fn white_edges(&self, w: usize) -> &[usize] {
        &self.white_edges[w]
    }

    pub fn black_edges(&self, b: usize) -> &[usize] {
        &self.black_edges[b]
    }

    /// True when every edge weight is known exactly.
    pub fn has_exact_weights(&self) -> bool {
        self.edges.iter().all(|e| e.exact_weight.is_some())
    }

    /// Same graph with replaced edge energies; exact weights are re-derived.
    pub fn with_energies(&self, energies: &[f64]) -> Result<Self> {
        assert_eq!(energies.len(), self.edges.len());
        let specs = self
            .edges
            .iter()
            .zip(energies)
            .map(|(e, &en)| EdgeSpec::new(e.white, e.black, en, e.offset))
            .collect();
        Self::from_parts(self.whites.clone(), self.blacks.clone(), specs)
    }

    fn check_connected(&self) -> Result<()> {
        let nw = self.whites.len();
        let mut seen = vec![false; self.num_vertices()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            let nbrs: Vec<usize> = if v < nw {
                self.white_edges[v].iter().map(|&e| nw + self.edges[e].black).collect()
            } else {
                self.black_edges[v - nw].iter().map(|&e| self.edges[e].white).collect()
            };
            for u in nbrs {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(DimerError::Disconnected)
        }
    }

    /// Minimum energy over matchings of G1 that contain `forced` edges and
    /// avoid `excluded` ones; returns the energy and `white -> edge`.
    fn min_energy_matching(&self, forced: &[usize], excluded: &[usize]) -> Option<(f64, Vec<usize>)> {
        let n = self.size();
        let mut w_used = vec![false; n];
        let mut b_used = vec![false; n];
        let mut fixed = 0.0;
        for &e in forced {
            let ed = &self.edges[e];
            if w_used[ed.white] || b_used[ed.black] {
                return None;
            }
            w_used[ed.white] = true;
            b_used[ed.black] = true;
            fixed += ed.energy;
        }
        let rows: Vec<usize> = (0..n).filter(|&w| !w_used[w]).collect();
        let cols: Vec<usize> = (0..n).filter(|&b| !b_used[b]).collect();
        let mut col_index = vec![usize::MAX; n];
        for (j, &b) in cols.iter().enumerate() {
            col_index[b] = j;
        }
        let mut cost = vec![vec![f64::INFINITY; cols.len()]; rows.len()];
        let mut best_edge = vec![vec![usize::MAX; cols.len()]; rows.len()];
        for (i, &w) in rows.iter().enumerate() {
            for &e in &self.white_edges[w] {
                if excluded.contains(&e) {
                    continue;
                }
                let j = col_index[self.edges[e].black];
                if j == usize::MAX {
                    continue;
                }
                if self.edges[e].energy < cost[i][j] {
                    cost[i][j] = self.edges[e].energy;
                    best_edge[i][j] = e;
                }
            }
        }
        let (c, assign) = min_cost_assignment(&cost)?;
        let mut by_white = vec![usize::MAX; n];
        for &e in forced {
            by_white[self.edges[e].white] = e;
        }
        for (i, &w) in rows.iter().enumerate() {
            by_white[w] = best_edge[i][assign[i]];
        }
        Some((fixed + c, by_white))
    }

    /// The reference matching `M0` of G1 as `white -> edge`: minimum energy,
    /// ties broken by the lexicographically least sorted edge set.
    pub fn reference_matching(&self) -> Vec<usize> {
        let (best, _) = self.min_energy_matching(&[], &[]).expect("validated domain has a perfect matching");
        let scale = self.edges.iter().map(|e| e.energy.abs()).fold(1.0, f64::max) * self.size() as f64;
        let tol = 1e-9 * scale;
        let mut forced = Vec::new();
        let mut excluded = Vec::new();
        for e in 0..self.edges.len() {
            if forced.len() == self.size() {
                break;
            }
            let mut trial = forced.clone();
            trial.push(e);
            match self.min_energy_matching(&trial, &excluded) {
                Some((c, _)) if c <= best + tol => forced = trial,
                _ => excluded.push(e),
            }
        }
        let mut by_white = vec![usize::MAX; self.size()];
        for &e in &forced {
            by_white[self.edges[e].white] = e;
        }
        by_white
    }

    pub fn torus(&self, n: usize) -> Result<TorusGraph> {
        TorusGraph::new(self.clone(), n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const HONEYCOMB: &str = r#"{
        "whites": [{"id": "w", "pos": [0.6, 0.6]}],
        "blacks": [{"id": "b", "pos": [0.3, 0.3]}],
        "edges": [
            {"white": "w", "black": "b", "energy": 0, "offset": [0, 0]},
            {"white": "w", "black": "b", "energy": 0, "offset": [1, 0]},
            {"white": "w", "black": "b", "energy": 0, "offset": [0, 1]}
        ]}"#;

    #[test]
    fn honeycomb_has_one_hexagon() {
        let d = parse_domain(HONEYCOMB).unwrap();
        assert_eq!(d.faces.len(), 1);
        assert_eq!(d.faces[0].darts.len(), 6);
        assert_eq!(d.reference_matching(), vec![0]);
    }

    #[test]
    fn white_white_edge_is_rejected() {
        let text = r#"{
            "whites": [{"id": "w", "pos": [0.6, 0.6]}, {"id": "v", "pos": [0.1, 0.6]}],
            "blacks": [{"id": "b", "pos": [0.3, 0.3]}],
            "edges": [{"white": "w", "black": "v", "energy": 0, "offset": [0, 0]}]}"#;
        let err = parse_domain(text).unwrap_err();
        assert!(matches!(err, DimerError::NonBipartite(_)), "{err}");
    }

    #[test]
    fn crossing_edges_are_rejected() {
        let text = r#"{
            "whites": [{"id": "w1", "pos": [0.1, 0.1]}, {"id": "w2", "pos": [0.1, 0.9]}],
            "blacks": [{"id": "b1", "pos": [0.9, 0.9]}, {"id": "b2", "pos": [0.9, 0.1]}],
            "edges": [
                {"white": "w1", "black": "b1", "energy": 0, "offset": [0, 0]},
                {"white": "w2", "black": "b2", "energy": 0, "offset": [0, 0]}
            ]}"#;
        let err = parse_domain(text).unwrap_err();
        assert!(matches!(err, DimerError::Planarity(_)), "{err}");
    }

    #[test]
    fn reference_prefers_low_energy_then_least_edges() {
        let text = r#"{
            "whites": [{"id": "w1", "pos": [0.25, 0.25]}, {"id": "w2", "pos": [0.75, 0.75]}],
            "blacks": [{"id": "b1", "pos": [0.75, 0.25]}, {"id": "b2", "pos": [0.25, 0.75]}],
            "edges": [
                {"white": "w1", "black": "b1", "energy": 0, "offset": [0, 0]},
                {"white": "w1", "black": "b1", "energy": 0, "offset": [-1, 0]},
                {"white": "w1", "black": "b2", "energy": 0, "offset": [0, 0]},
                {"white": "w1", "black": "b2", "energy": 0, "offset": [0, -1]},
                {"white": "w2", "black": "b2", "energy": 5, "offset": [0, 0]},
                {"white": "w2", "black": "b2", "energy": 5, "offset": [1, 0]},
                {"white": "w2", "black": "b1", "energy": 0, "offset": [0, 0]},
                {"white": "w2", "black": "b1", "energy": 0, "offset": [0, 1]}
            ]}"#;
        let d = parse_domain(text).unwrap();
        let m = d.reference_matching();
        assert_eq!(m, vec![2, 6]);
    }

    #[test]
    fn weight_field_takes_precedence() {
        let text = HONEYCOMB.replacen(r#""energy": 0, "offset": [1, 0]"#, r#""weight": "1/3", "offset": [1, 0]"#, 1);
        let d = parse_domain(&text).unwrap();
        assert_eq!(d.edges[1].exact_weight, parse_rational("1/3"));
        assert!((d.edges[1].energy - 3f64.ln()).abs() < 1e-15);
    }
}
