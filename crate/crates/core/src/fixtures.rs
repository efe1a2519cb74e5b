//! Small named graphs with known curvature, used by tests, benches and the CLI docs.

use crate::graph::{EdgeRecord, VertexId, WeightedGraph};

fn build(edges: &[(&str, &str, &str, f64)]) -> WeightedGraph {
    let mut vertices: Vec<VertexId> = Vec::new();
    for &(_, u, v, _) in edges {
        for x in [u, v] {
            if !vertices.iter().any(|y| y.as_str() == x) {
                vertices.push(x.into());
            }
        }
    }
    let records = edges
        .iter()
        .map(|&(id, u, v, l)| EdgeRecord::new(id, u, v, l))
        .collect();
    WeightedGraph::new(vertices, records).expect("fixture graphs are valid")
}

/// Unit path `a–b–c–d–e–f` with a pendant edge `c–g`.
pub fn branched_path() -> WeightedGraph {
    build(&[
        ("ab", "a", "b", 1.0),
        ("bc", "b", "c", 1.0),
        ("cd", "c", "d", 1.0),
        ("de", "d", "e", 1.0),
        ("ef", "e", "f", 1.0),
        ("cg", "c", "g", 1.0),
    ])
}

/// Two unit triangles joined by a unit bridge `3–4`. Edges `e0..e6`, bridge `e3`.
pub fn barbell() -> WeightedGraph {
    WeightedGraph::from_edge_list(&[
        ("3", "1", 1.0),
        ("1", "2", 1.0),
        ("2", "3", 1.0),
        ("3", "4", 1.0),
        ("4", "5", 1.0),
        ("5", "6", 1.0),
        ("6", "4", 1.0),
    ])
    .expect("fixture graphs are valid")
}

/// Barbell with degree-two vertices suppressed: loops of length 3 joined by a unit bridge.
pub fn barbell_minimal() -> WeightedGraph {
    WeightedGraph::from_edge_list(&[("a", "a", 3.0), ("a", "b", 1.0), ("b", "b", 3.0)])
        .expect("fixture graphs are valid")
}

/// Unit square `1–2–4–3` with roof vertex `5` over `3–4`.
pub fn house() -> WeightedGraph {
    build(&[
        ("floor", "1", "2", 1.0),
        ("right", "2", "4", 1.0),
        ("ceiling", "4", "3", 1.0),
        ("left", "3", "1", 1.0),
        ("roof_l", "3", "5", 1.0),
        ("roof_r", "5", "4", 1.0),
    ])
}

/// Three parallel edges between `3` and `4` with lengths 3, 1, 2: the house
/// graph with its degree-two vertices suppressed.
pub fn theta() -> WeightedGraph {
    build(&[
        ("bottom", "3", "4", 3.0),
        ("middle", "4", "3", 1.0),
        ("roof", "3", "4", 2.0),
    ])
}

/// Cycle `v0–v1–…–v(n−1)–v0` with the given lengths; edge `ei` joins `vi` and `v(i+1)`.
pub fn cycle(lengths: &[f64]) -> WeightedGraph {
    let n = lengths.len();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<(&str, &str, f64)> = (0..n)
        .map(|i| (names[i].as_str(), names[(i + 1) % n].as_str(), lengths[i]))
        .collect();
    WeightedGraph::from_edge_list(&edges).expect("fixture graphs are valid")
}

/// Complete graph on `n` vertices with unit lengths.
pub fn complete(n: usize) -> WeightedGraph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((names[i].as_str(), names[j].as_str(), 1.0));
        }
    }
    WeightedGraph::from_edge_list(&edges).expect("fixture graphs are valid")
}

/// Star with centre `c` and leaves `l0..`, given leaf-edge lengths.
pub fn star(lengths: &[f64]) -> WeightedGraph {
    let names: Vec<String> = (0..lengths.len()).map(|i| format!("l{i}")).collect();
    let edges: Vec<(&str, &str, f64)> = names
        .iter()
        .zip(lengths)
        .map(|(l, &len)| ("c", l.as_str(), len))
        .collect();
    WeightedGraph::from_edge_list(&edges).expect("fixture graphs are valid")
}
