//! Weighted multigraphs: the state object of every computation in this crate.
//!
//! A [`WeightedGraph`] is an immutable, validated, connected multigraph whose
//! edges carry strictly positive lengths (resistances). Loops and parallel
//! edges are first-class: contraction and degree-two suppression create them
//! even from simple inputs. Every mutator returns a new graph.
//!
//! Degree convention: a loop contributes 2 to the degree of its vertex.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex label, unique within a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

/// Edge label, unique within a graph and stable across flow and subdivision.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub String);

macro_rules! string_id {
    ($t:ty) => {
        impl $t {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $t {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(VertexId);
string_id!(EdgeId);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

impl EdgeRecord {
    pub fn new(id: impl Into<EdgeId>, u: impl Into<VertexId>, v: impl Into<VertexId>, length: f64) -> Self {
        Self {
            id: id.into(),
            u: u.into(),
            v: v.into(),
            length,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// Result bookkeeping of [`WeightedGraph::contract`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContractionMap {
    /// Every old vertex mapped to the vertex that represents it afterwards.
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    /// Contracted edges, in the order they appeared in the source graph.
    pub removed_edges: Vec<EdgeId>,
    /// Surviving edges whose endpoints were identified, turning them into loops.
    pub new_loops: Vec<EdgeId>,
}

impl ContractionMap {
    /// Compose `self` (applied first) with `next`.
    pub fn then(&self, next: &ContractionMap) -> ContractionMap {
        let vertex_map = self
            .vertex_map
            .iter()
            .map(|(old, mid)| {
                let new = next.vertex_map.get(mid).unwrap_or(mid).clone();
                (old.clone(), new)
            })
            .collect();
        let removed_edges = self
            .removed_edges
            .iter()
            .chain(&next.removed_edges)
            .cloned()
            .collect();
        let mut new_loops: Vec<EdgeId> = self
            .new_loops
            .iter()
            .filter(|e| !next.removed_edges.contains(e))
            .cloned()
            .collect();
        new_loops.extend(next.new_loops.iter().cloned());
        ContractionMap {
            vertex_map,
            removed_edges,
            new_loops,
        }
    }
}

/// Connected weighted multigraph with positive edge lengths.
///
/// The single-vertex graph without edges is accepted as the "point" that a
/// flow with surgery terminates on; every other graph has at least one edge.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeRecord>,
    ends: Vec<(usize, usize)>,
    vertex_index: HashMap<VertexId, usize>,
    edge_index: HashMap<EdgeId, usize>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl WeightedGraph {
    /// Build and validate a graph.
    pub fn new(vertices: Vec<VertexId>, edges: Vec<EdgeRecord>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    kind: "vertex",
                    id: v.to_string(),
                });
            }
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut ends = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    kind: "edge",
                    id: e.id.to_string(),
                });
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::NonpositiveLength {
                    edge: e.id.to_string(),
                    length: e.length,
                });
            }
            let lookup = |v: &VertexId| {
                vertex_index.get(v).copied().ok_or_else(|| Error::DanglingEndpoint {
                    edge: e.id.to_string(),
                    vertex: v.to_string(),
                })
            };
            ends.push((lookup(&e.u)?, lookup(&e.v)?));
        }
        let g = Self {
            vertices,
            edges,
            ends,
            vertex_index,
            edge_index,
        };
        g.check_connected()?;
        Ok(g)
    }

    /// Build from `(u, v, length)` triples; vertices are inferred in order of
    /// first appearance and edges are named `e0, e1, ...`.
    pub fn from_edge_list(edges: &[(&str, &str, f64)]) -> Result<Self> {
        let mut vertices: Vec<VertexId> = Vec::new();
        let mut seen = HashSet::new();
        let mut records = Vec::with_capacity(edges.len());
        for (i, &(u, v, length)) in edges.iter().enumerate() {
            for x in [u, v] {
                if seen.insert(x) {
                    vertices.push(x.into());
                }
            }
            records.push(EdgeRecord::new(format!("e{i}"), u, v, length));
        }
        Self::new(vertices, records)
    }

    /// The single-vertex graph with no edges.
    pub fn point(vertex: impl Into<VertexId>) -> Self {
        Self::new(vec![vertex.into()], Vec::new()).expect("a single vertex is connected")
    }

    /// Re-checks every invariant. Graphs built through [`WeightedGraph::new`]
    /// always pass; this exists for callers holding deserialized parts.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.vertices.clone(), self.edges.clone()).map(|_| ())
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.vertices.len();
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            None => Ok(()),
            Some(i) => Err(Error::DisconnectedGraph {
                root: self.vertices[0].to_string(),
                vertex: self.vertices[i].to_string(),
            }),
        }
    }

    /// Neighbour lists `(vertex, edge)` over non-loop edges.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if a != b {
                adj[a].push((b, i));
                adj[b].push((a, i));
            }
        }
        adj
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_point(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertex_index(&self, v: &VertexId) -> Result<usize> {
        self.vertex_index
            .get(v)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    pub fn edge_index(&self, e: &EdgeId) -> Result<usize> {
        self.edge_index
            .get(e)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(e.to_string()))
    }

    pub fn edge(&self, e: &EdgeId) -> Result<&EdgeRecord> {
        Ok(&self.edges[self.edge_index(e)?])
    }

    /// Endpoint indices of the edge at position `i`.
    pub fn endpoints(&self, i: usize) -> (usize, usize) {
        self.ends[i]
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn non_loop_edge_count(&self) -> usize {
        self.ends.iter().filter(|(a, b)| a != b).count()
    }

    /// Cycle rank |E| - |V| + 1.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn degree(&self, v: &VertexId) -> Result<usize> {
        Ok(self.degrees()[self.vertex_index(v)?])
    }

    /// Degrees by vertex index; a loop counts twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for &(a, b) in &self.ends {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_bridge(&self, e: &EdgeId) -> Result<bool> {
        Ok(self.bridges()[self.edge_index(e)?])
    }

    /// Bridge flags by edge index (Tarjan low-link over edge ids, so
    /// parallel edges are handled correctly). Loops are never bridges.
    pub fn bridges(&self) -> Vec<bool> {
        let n = self.vertices.len();
        let adj = self.adjacency();
        let mut is_bridge = vec![false; self.edges.len()];
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut timer = 0;
        // (vertex, edge used to enter it, next neighbour position)
        let mut stack: Vec<(usize, Option<usize>, usize)> = Vec::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            stack.push((root, None, 0));
            while let Some(top) = stack.last_mut() {
                let (v, via, pos) = *top;
                if pos < adj[v].len() {
                    top.2 += 1;
                    let (w, e) = adj[v][pos];
                    if Some(e) == via {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, Some(e), 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let (Some(e), Some(&(p, _, _))) = (via, stack.last()) {
                        low[p] = low[p].min(low[v]);
                        if low[v] > disc[p] {
                            is_bridge[e] = true;
                        }
                    }
                }
            }
        }
        is_bridge
    }

    /// Same topology with new lengths, given in edge order.
    pub fn with_lengths(&self, lengths: &[f64]) -> Result<Self> {
        if lengths.len() != self.edges.len() {
            return Err(Error::InvalidConfig(format!(
                "expected {} lengths, got {}",
                self.edges.len(),
                lengths.len()
            )));
        }
        let edges = self
            .edges
            .iter()
            .zip(lengths)
            .map(|(e, &length)| EdgeRecord { length, ..e.clone() })
            .collect();
        Self::new(self.vertices.clone(), edges)
    }

    /// Every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let lengths: Vec<f64> = self.edges.iter().map(|e| e.length * factor).collect();
        self.with_lengths(&lengths)
    }

    /// The edge-deleted graph `G \ e`; fails with `DisconnectedGraph` when `e` is a bridge.
    pub fn without_edge(&self, e: &EdgeId) -> Result<Self> {
        let idx = self.edge_index(e)?;
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, r)| r.clone())
            .collect();
        Self::new(self.vertices.clone(), edges)
    }

    /// Replace non-loop edge `e = uv` by `u–x` of length `split·ℓ` and `x–v`
    /// of length `(1 − split)·ℓ` through a fresh vertex `x`.
    pub fn subdivide(&self, e: &EdgeId, split: f64) -> Result<Self> {
        let idx = self.edge_index(e)?;
        let rec = &self.edges[idx];
        if rec.is_loop() {
            return Err(Error::LoopSubdivision(e.to_string()));
        }
        if !(split > 0.0 && split < 1.0) {
            return Err(Error::SplitOutOfRange(split));
        }
        let x = fresh_id(format!("{}.x", e), |s| self.vertex_index.contains_key(&VertexId::from(s)));
        let id1 = fresh_id(format!("{}.1", e), |s| self.edge_index.contains_key(&EdgeId::from(s)));
        let id2 = fresh_id(format!("{}.2", e), |s| {
            s == id1 || self.edge_index.contains_key(&EdgeId::from(s))
        });
        let x = VertexId(x);
        let mut vertices = self.vertices.clone();
        vertices.push(x.clone());
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        for (i, r) in self.edges.iter().enumerate() {
            if i == idx {
                edges.push(EdgeRecord::new(id1.clone(), r.u.clone(), x.clone(), split * r.length));
                edges.push(EdgeRecord::new(id2.clone(), x.clone(), r.v.clone(), (1.0 - split) * r.length));
            } else {
                edges.push(r.clone());
            }
        }
        Self::new(vertices, edges)
    }

    /// Contract every edge in `es`: endpoints of non-loop edges are identified,
    /// all edges of `es` are deleted, and surviving edges between identified
    /// vertices become loops.
    pub fn contract(&self, es: &[EdgeId]) -> Result<(Self, ContractionMap)> {
        let mut drop = vec![false; self.edges.len()];
        for e in es {
            drop[self.edge_index(e)?] = true;
        }
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if drop[i] && a != b {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                // the earliest vertex of a class represents it
                let (keep, merge) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[merge] = keep;
            }
        }
        let rep: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        let vertices: Vec<VertexId> = (0..n)
            .filter(|&x| rep[x] == x)
            .map(|x| self.vertices[x].clone())
            .collect();
        let mut map = ContractionMap::default();
        for (v, &r) in self.vertices.iter().zip(&rep) {
            map.vertex_map.insert(v.clone(), self.vertices[r].clone());
        }
        let mut edges = Vec::new();
        for (i, r) in self.edges.iter().enumerate() {
            if drop[i] {
                map.removed_edges.push(r.id.clone());
                continue;
            }
            let (a, b) = self.ends[i];
            if a != b && rep[a] == rep[b] {
                map.new_loops.push(r.id.clone());
            }
            edges.push(EdgeRecord {
                u: self.vertices[rep[a]].clone(),
                v: self.vertices[rep[b]].clone(),
                ..r.clone()
            });
        }
        Ok((Self::new(vertices, edges)?, map))
    }

    /// Merge the two edges at every degree-two vertex into one edge of summed
    /// length until none is left; the inverse of subdivision. A vertex whose
    /// degree comes from a single loop is left alone.
    pub fn suppress_degree_two(&self) -> Self {
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        loop {
            let target = vertices.iter().position(|w| {
                let incident: Vec<&EdgeRecord> =
                    edges.iter().filter(|e| &e.u == w || &e.v == w).collect();
                incident.len() == 2 && incident.iter().all(|e| !e.is_loop())
            });
            let Some(wi) = target else { break };
            let w = vertices.remove(wi);
            let pos: Vec<usize> = edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.u == w || e.v == w)
                .map(|(i, _)| i)
                .collect();
            let (a, b) = (&edges[pos[0]], &edges[pos[1]]);
            let other = |e: &EdgeRecord| if e.u == w { e.v.clone() } else { e.u.clone() };
            let merged = EdgeRecord::new(
                format!("{}+{}", a.id, b.id),
                other(a),
                other(b),
                a.length + b.length,
            );
            edges[pos[0]] = merged;
            edges.remove(pos[1]);
        }
        Self::new(vertices, edges).expect("suppressing degree-two vertices keeps the graph valid")
    }
}

fn fresh_id(base: String, taken: impl Fn(&str) -> bool) -> String {
    if !taken(&base) {
        return base;
    }
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|s| !taken(s))
        .expect("unbounded suffix search")
}
