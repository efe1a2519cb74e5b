//! Benchmark inputs shared by the curvature and flow benches.

use ricci_foster::corpus::{random_corpus, CorpusParams};
use ricci_foster::{fixtures, WeightedGraph};

/// Named graphs spanning the sizes the library targets.
pub fn workloads() -> Vec<(&'static str, WeightedGraph)> {
    let wide = CorpusParams {
        min_vertices: 24,
        max_vertices: 24,
        max_edges: 60,
        ..CorpusParams::default()
    };
    let random = random_corpus(7, 1, &wide).remove(0);
    vec![
        ("house", fixtures::house()),
        ("barbell", fixtures::barbell()),
        ("k8", fixtures::complete(8)),
        ("cycle64", fixtures::cycle(&[1.0; 64])),
        ("random24", random),
    ]
}
