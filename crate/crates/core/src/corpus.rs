//! Seeded random multigraphs for property checks.
//!
//! Generation is fully determined by the seed (ChaCha8), so a corpus can be
//! regenerated bit-for-bit anywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::curvature_report;
use crate::graph::{EdgeRecord, VertexId, WeightedGraph};

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5eed_f057;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub max_edges: usize,
    pub min_length: f64,
    pub max_length: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            min_vertices: 2,
            max_vertices: 8,
            max_edges: 14,
            min_length: 0.1,
            max_length: 10.0,
        }
    }
}

/// One connected multigraph: a random spanning tree plus random extra edges
/// (loops and parallel edges allowed), lengths log-uniform in the range.
pub fn random_multigraph(rng: &mut impl Rng, params: &CorpusParams) -> WeightedGraph {
    let n = rng.random_range(params.min_vertices..=params.max_vertices);
    let vertices: Vec<VertexId> = (0..n).map(|i| VertexId(format!("v{i}"))).collect();
    let (lo, hi) = (params.min_length.ln(), params.max_length.ln());
    let length = |rng: &mut dyn rand::RngCore| rng.random_range(lo..=hi).exp();
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    let budget = params.max_edges.max(n - 1);
    let extra = rng.random_range(0..=budget - (n - 1));
    for _ in 0..extra {
        pairs.push((rng.random_range(0..n), rng.random_range(0..n)));
    }
    // shuffle so tree edges are not always first
    for i in (1..pairs.len()).rev() {
        let j = rng.random_range(0..=i);
        pairs.swap(i, j);
    }
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let (a, b) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
            EdgeRecord::new(format!("e{i}"), vertices[a].clone(), vertices[b].clone(), length(rng))
        })
        .collect();
    WeightedGraph::new(vertices, edges).expect("spanning tree keeps the graph connected")
}

pub fn random_corpus(seed: u64, count: usize, params: &CorpusParams) -> Vec<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_multigraph(&mut rng, params)).collect()
}

/// Random graphs whose every edge curvature is nonnegative, by rejection.
pub fn random_nonnegative_corpus(seed: u64, count: usize) -> Vec<WeightedGraph> {
    let params = CorpusParams {
        min_vertices: 3,
        max_vertices: 6,
        max_edges: 12,
        min_length: 0.5,
        max_length: 2.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 1_000_000, "rejection sampling for nonnegative curvature stalled");
        let g = random_multigraph(&mut rng, &params);
        let report = curvature_report(&g).expect("corpus graphs are valid");
        if report.edges.iter().all(|e| e.curvature >= 0.0) {
            out.push(g);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = random_corpus(7, 20, &CorpusParams::default());
        let b = random_corpus(7, 20, &CorpusParams::default());
        assert_eq!(a, b);
        assert!(a.iter().all(|g| g.vertex_count() <= 8 && g.edge_count() <= 14));
    }

    #[test]
    fn nonnegative_corpus_is_nonnegative() {
        for g in random_nonnegative_corpus(3, 5) {
            let r = curvature_report(&g).unwrap();
            assert!(r.edges.iter().all(|e| e.curvature >= 0.0));
        }
    }
}
