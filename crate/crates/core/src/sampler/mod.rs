//! Random matchings of the torus graphs `G_n`: exact sampling from the
//! enumerated Boltzmann distribution, face-rotation Metropolis chains within
//! a height-change class, and the Monte-Carlo measurements built on them.

mod class;
mod loops;
mod variance;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{DimerError, Result};
use crate::lattice::{FaceInstance, Matching, TorusGraph, DEFAULT_ENUMERATION_CAP};

pub use class::{corner_matching, matching_in_class};
pub use loops::{double_dimer_loops, double_dimer_loops_around, loop_census, LoopCensus, LoopOptions, LoopRun};
pub use variance::{variance_profile, VarianceOptions, VariancePoint, VarianceProfile, LIQUID_COEFFICIENT_CANDIDATES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    ExactEnumeration,
    RotationMcmc,
}

/// Metadata and output of one sampling run.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRun {
    pub kind: SamplerKind,
    pub n: usize,
    pub seed: u64,
    pub sweeps: usize,
    pub frozen: bool,
    /// Matched edge instances of each sample, indexed by white instance.
    pub samples: Vec<Vec<usize>>,
}

/// Generator for chain `index` of a run with master seed `seed`: each chain
/// gets its own ChaCha stream.
pub fn chain_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// I.i.d. draws from `e^-E(M) / Z` over the enumerated matchings of `torus`.
pub fn sample_exact(torus: &TorusGraph, seed: u64, count: usize) -> Result<Vec<Matching>> {
    let records = torus.enumerate_matchings(DEFAULT_ENUMERATION_CAP)?;
    let emin = records.iter().map(|r| r.energy).fold(f64::INFINITY, f64::min);
    let dist = WeightedIndex::new(records.iter().map(|r| (emin - r.energy).exp()))
        .map_err(|e| DimerError::InvalidArgument(format!("no samplable matching: {e}")))?;
    let mut rng = chain_rng(seed, 0);
    Ok((0..count).map(|_| records[dist.sample(&mut rng)].matching.clone()).collect())
}

/// Boundary of every face instance of a torus as a cyclic list of edge
/// instances, and the lifted position of each boundary vertex.
#[derive(Clone, Debug)]
pub struct FaceTable {
    pub boundaries: Vec<Vec<usize>>,
    /// Faces whose boundary is a simple cycle of `G_n`; only these rotate.
    pub simple: Vec<bool>,
    pub centers: Vec<[f64; 2]>,
}

impl FaceTable {
    pub fn new(torus: &TorusGraph) -> Self {
        let d = &torus.base;
        let nf = torus.num_faces();
        let mut boundaries = Vec::with_capacity(nf);
        let mut simple = Vec::with_capacity(nf);
        let mut centers = Vec::with_capacity(nf);
        for idx in 0..nf {
            let FaceInstance { face, cell } = torus.face_instance(idx);
            let f = &d.faces[face];
            let mut edges = Vec::with_capacity(f.degree());
            let mut whites = Vec::new();
            let mut blacks = Vec::new();
            let mut center = [0.0, 0.0];
            for (&dart, &(cx, cy)) in f.darts.iter().zip(&f.cells) {
                let e = &d.edges[dart / 2];
                let origin = (cell.0 as i64 + cx as i64, cell.1 as i64 + cy as i64);
                let (pos, white_cell) = if dart % 2 == 0 {
                    (d.whites[e.white].pos, origin)
                } else {
                    (d.blacks[e.black].pos, (origin.0 - e.offset.0 as i64, origin.1 - e.offset.1 as i64))
                };
                center[0] += pos[0] + origin.0 as f64;
                center[1] += pos[1] + origin.1 as f64;
                let (wc, _) = torus.reduce_cell(white_cell);
                let inst = torus.edge_instance(dart / 2, wc);
                whites.push(torus.edge(inst).white);
                blacks.push(torus.edge(inst).black);
                edges.push(inst);
            }
            let k = f.degree() as f64;
            centers.push([center[0] / k, center[1] / k]);
            whites.sort_unstable();
            blacks.sort_unstable();
            let mut sorted = edges.clone();
            sorted.sort_unstable();
            let distinct = |v: &[usize]| v.windows(2).all(|p| p[0] != p[1]);
            // Each vertex of a simple cycle appears on two consecutive darts.
            whites.dedup();
            blacks.dedup();
            simple.push(distinct(&sorted) && whites.len() + blacks.len() == edges.len());
            boundaries.push(edges);
        }
        Self { boundaries, simple, centers }
    }
}

/// A face-rotation Metropolis chain. Rotating a face whose boundary
/// alternates between matched and unmatched edges swaps the two halves and
/// is accepted with probability `min(1, e^-ΔE)`; the proposal is uniform over
/// faces, so detailed balance holds for the Boltzmann measure of the
/// starting height-change class.
pub struct Chain<'a> {
    torus: &'a TorusGraph,
    faces: &'a FaceTable,
    energies: Vec<f64>,
    matching: Matching,
    rng: ChaCha8Rng,
    pub proposed: u64,
    pub accepted: u64,
}

impl<'a> Chain<'a> {
    pub fn new(torus: &'a TorusGraph, faces: &'a FaceTable, initial: Matching, rng: ChaCha8Rng) -> Result<Self> {
        if !torus.is_perfect_matching(&initial) {
            return Err(DimerError::InvalidArgument("initial state is not a perfect matching".into()));
        }
        let energies = torus.edges().iter().map(|e| torus.base.edges[e.base].energy).collect();
        Ok(Self { torus, faces, energies, matching: initial, rng, proposed: 0, accepted: 0 })
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    fn is_matched(&self, e: usize) -> bool {
        self.matching.by_white[self.torus.edge(e).white] == e
    }

    /// Whether face `f` can rotate in the current state.
    pub fn rotatable(&self, f: usize) -> bool {
        if !self.faces.simple[f] {
            return false;
        }
        let b = &self.faces.boundaries[f];
        b.iter().filter(|&&e| self.is_matched(e)).count() * 2 == b.len()
    }

    /// No face can rotate: the chain cannot move.
    pub fn is_frozen(&self) -> bool {
        !(0..self.faces.boundaries.len()).any(|f| self.rotatable(f))
    }

    /// Proposes a rotation at face `f`; returns whether it was applied.
    pub fn try_rotate(&mut self, f: usize) -> bool {
        self.proposed += 1;
        if !self.rotatable(f) {
            return false;
        }
        let faces = self.faces;
        let boundary = &faces.boundaries[f];
        let mut delta = 0.0;
        let mut incoming = [0usize; 16];
        let mut k = 0;
        for &e in boundary {
            if self.is_matched(e) {
                delta -= self.energies[e];
            } else {
                delta += self.energies[e];
                if k < incoming.len() {
                    incoming[k] = e;
                }
                k += 1;
            }
        }
        if delta > 0.0 && self.rng.random::<f64>() >= (-delta).exp() {
            return false;
        }
        if k <= incoming.len() {
            for &e in &incoming[..k] {
                self.matching.by_white[self.torus.edge(e).white] = e;
            }
        } else {
            let unmatched: Vec<usize> = boundary.iter().copied().filter(|&e| !self.is_matched(e)).collect();
            for e in unmatched {
                self.matching.by_white[self.torus.edge(e).white] = e;
            }
        }
        self.accepted += 1;
        true
    }

    /// One sweep: as many uniform face proposals as there are faces.
    pub fn sweep(&mut self) {
        let nf = self.faces.boundaries.len();
        for _ in 0..nf {
            let f = self.rng.random_range(0..nf);
            self.try_rotate(f);
        }
        debug_assert!(self.torus.is_perfect_matching(&self.matching));
    }

    pub fn run(&mut self, sweeps: usize) {
        for _ in 0..sweeps {
            self.sweep();
        }
    }
}

#[derive(Clone, Debug)]
pub struct McmcResult {
    pub matching: Matching,
    /// No rotatable face existed, so the input was returned unchanged.
    pub frozen: bool,
    pub proposed: u64,
    pub accepted: u64,
}

/// Runs a face-rotation chain from `initial` for `sweeps` sweeps.
pub fn sample_mcmc(torus: &TorusGraph, initial: Matching, seed: u64, sweeps: usize) -> Result<McmcResult> {
    let faces = FaceTable::new(torus);
    let mut chain = Chain::new(torus, &faces, initial, chain_rng(seed, 0))?;
    if sweeps > 0 && chain.is_frozen() {
        return Ok(McmcResult { matching: chain.matching, frozen: true, proposed: 0, accepted: 0 });
    }
    chain.run(sweeps);
    Ok(McmcResult { proposed: chain.proposed, accepted: chain.accepted, matching: chain.matching, frozen: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_streams_differ() {
        let a: u64 = chain_rng(7, 0).random();
        let b: u64 = chain_rng(7, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, chain_rng(7, 0).random::<u64>());
    }
}
