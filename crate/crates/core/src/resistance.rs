//! Effective resistance, unit currents and resistance derivatives.
//!
//! Edges are resistors with resistance equal to their length. All quantities
//! come from one dense Cholesky factorization of the weighted Laplacian with
//! the first vertex grounded; the inverse of that reduced Laplacian, padded
//! with a zero row and column at the ground, is kept as the Green matrix `G`.
//! Then `ω(x, y) = G_xx + G_yy − 2 G_xy`, and the potentials of a unit current
//! from `x` to `y` are `φ = G (1_x − 1_y)`.
//!
//! Bridges and loops are classified combinatorially: their ratios `ω_e / ℓ_e`
//! are exactly 1 and 0.
//!
//! [`resistance_by_trees`] evaluates the spanning-tree ratio
//! `τ(G/xy) / τ(G)` by brute-force enumeration and is independent of the
//! linear algebra; it is the oracle the Laplacian path is checked against.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph};

/// Relative residual accepted from the reduced-Laplacian inverse.
pub const SOLVER_TOLERANCE: f64 = 1e-12;

/// Default cap on non-loop edges for spanning-tree enumeration.
pub const TREE_ENUMERATION_CAP: usize = 16;

/// Grounded inverse of the weighted Laplacian (ground = vertex 0).
/// Cholesky factor of the Laplacian with vertex 0 grounded.
#[derive(Debug, Clone)]
pub(crate) struct GroundedLaplacian {
    n: usize,
    chol: Option<Cholesky<f64, Dyn>>,
}

impl GroundedLaplacian {
    pub(crate) fn new(n: usize, ends: &[(usize, usize)], lengths: &[f64]) -> Result<Self> {
        if n == 1 {
            return Ok(Self { n, chol: None });
        }
        let m = n - 1;
        let mut lap = DMatrix::<f64>::zeros(m, m);
        for (&(a, b), &len) in ends.iter().zip(lengths) {
            if a == b {
                continue;
            }
            let c = 1.0 / len;
            if a > 0 {
                lap[(a - 1, a - 1)] += c;
            }
            if b > 0 {
                lap[(b - 1, b - 1)] += c;
            }
            if a > 0 && b > 0 {
                lap[(a - 1, b - 1)] -= c;
                lap[(b - 1, a - 1)] -= c;
            }
        }
        let chol = lap
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NumericalFailure("reduced Laplacian is not positive definite".into()))?;
        let inv = chol.inverse();
        let resid = (&lap * &inv - DMatrix::identity(m, m)).amax();
        let scale = lap.amax() * inv.amax() * m as f64;
        if resid.is_nan() || resid > SOLVER_TOLERANCE * scale.max(1.0) {
            return Err(Error::NumericalFailure(format!(
                "Laplacian solve residual {resid:.3e} exceeds tolerance"
            )));
        }
        Ok(Self { n, chol: Some(chol) })
    }

    pub(crate) fn green(&self) -> DMatrix<f64> {
        let mut green = DMatrix::zeros(self.n, self.n);
        if let Some(chol) = &self.chol {
            green.view_mut((1, 1), (self.n - 1, self.n - 1)).copy_from(&chol.inverse());
        }
        green
    }

    /// Vertex potentials of a unit current from `x` to `y`, ground at 0.
    pub(crate) fn dipole_potentials(&self, x: usize, y: usize) -> Vec<f64> {
        let mut phi = vec![0.0; self.n];
        let Some(chol) = &self.chol else { return phi };
        let mut rhs = DVector::zeros(self.n - 1);
        if x > 0 {
            rhs[x - 1] += 1.0;
        }
        if y > 0 {
            rhs[y - 1] -= 1.0;
        }
        phi[1..].copy_from_slice(chol.solve(&rhs).as_slice());
        phi
    }

    /// `ω_xy` as the potential drop of a unit dipole. Unlike reading it off
    /// the Green matrix this does not cancel `O(ω(x, ground))` terms, so it
    /// stays accurate for short edges far from the ground vertex.
    pub(crate) fn dipole_resistance(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return 0.0;
        }
        let phi = self.dipole_potentials(x, y);
        (phi[x] - phi[y]).max(0.0)
    }
}

#[inline]
pub(crate) fn omega_from_green(green: &DMatrix<f64>, x: usize, y: usize) -> f64 {
    if x == y {
        0.0
    } else {
        (green[(x, x)] + green[(y, y)] - 2.0 * green[(x, y)]).max(0.0)
    }
}

/// `ω_e / ℓ_e` per edge with bridges pinned to 1 and loops to 0.
pub(crate) fn pinned_ratios(
    omega: impl Fn(usize, usize) -> f64,
    ends: &[(usize, usize)],
    lengths: &[f64],
    bridges: &[bool],
) -> Vec<f64> {
    ends.iter()
        .zip(lengths)
        .zip(bridges)
        .map(|((&(a, b), &len), &bridge)| {
            if a == b {
                0.0
            } else if bridge {
                1.0
            } else {
                omega(a, b) / len
            }
        })
        .collect()
}

fn bridge_sides(g: &WeightedGraph, bridges: &[bool]) -> Vec<Option<Vec<bool>>> {
    let adj = g.adjacency();
    bridges
        .iter()
        .enumerate()
        .map(|(i, &bridge)| {
            bridge.then(|| {
                let (u, _) = g.endpoints(i);
                let mut side = vec![false; g.vertex_count()];
                side[u] = true;
                let mut stack = vec![u];
                while let Some(a) = stack.pop() {
                    for &(b, f) in &adj[a] {
                        if f != i && !side[b] {
                            side[b] = true;
                            stack.push(b);
                        }
                    }
                }
                side
            })
        })
        .collect()
}

/// All-pairs effective resistances and per-edge resistance ratios of a graph.
#[derive(Debug, Clone)]
pub struct ResistanceProfile {
    graph: WeightedGraph,
    green: DMatrix<f64>,
    /// Present when built from lengths; gives accurate short-range values.
    grounded: Option<GroundedLaplacian>,
    bridges: Vec<bool>,
    /// For each bridge, which vertices stay on its `u` side once it is cut.
    bridge_sides: Vec<Option<Vec<bool>>>,
    ratios: Vec<f64>,
}

impl ResistanceProfile {
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        let ends: Vec<_> = (0..g.edge_count()).map(|i| g.endpoints(i)).collect();
        let grounded = GroundedLaplacian::new(g.vertex_count(), &ends, &g.lengths())?;
        let green = grounded.green();
        let ratios = pinned_ratios(|a, b| grounded.dipole_resistance(a, b), &ends, &g.lengths(), &g.bridges());
        Ok(Self::from_parts(g, green, Some(grounded), ratios))
    }

    /// Build a profile from an externally supplied resistance matrix, indexed
    /// like `g.vertices()`. No consistency check is made against `g`.
    pub fn from_resistance_matrix(g: &WeightedGraph, omega: &DMatrix<f64>) -> Result<Self> {
        let n = g.vertex_count();
        if omega.shape() != (n, n) {
            return Err(Error::InvalidConfig(format!(
                "resistance matrix is {:?}, expected {n}x{n}",
                omega.shape()
            )));
        }
        let green = DMatrix::from_fn(n, n, |a, b| 0.5 * (omega[(a, 0)] + omega[(b, 0)] - omega[(a, b)]));
        let ends: Vec<_> = (0..g.edge_count()).map(|i| g.endpoints(i)).collect();
        let ratios = pinned_ratios(|a, b| omega_from_green(&green, a, b), &ends, &g.lengths(), &g.bridges());
        Ok(Self::from_parts(g, green, None, ratios))
    }

    fn from_parts(
        g: &WeightedGraph,
        green: DMatrix<f64>,
        grounded: Option<GroundedLaplacian>,
        ratios: Vec<f64>,
    ) -> Self {
        let bridges = g.bridges();
        let bridge_sides = bridge_sides(g, &bridges);
        Self {
            graph: g.clone(),
            green,
            grounded,
            bridge_sides,
            bridges,
            ratios,
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    /// Effective resistance between two vertices.
    pub fn omega(&self, x: &VertexId, y: &VertexId) -> Result<f64> {
        Ok(self.omega_by_index(self.graph.vertex_index(x)?, self.graph.vertex_index(y)?))
    }

    pub fn omega_by_index(&self, x: usize, y: usize) -> f64 {
        match &self.grounded {
            Some(grounded) => grounded.dipole_resistance(x, y),
            None => omega_from_green(&self.green, x, y),
        }
    }

    /// Full resistance matrix in vertex order.
    pub fn omega_matrix(&self) -> DMatrix<f64> {
        let n = self.graph.vertex_count();
        DMatrix::from_fn(n, n, |a, b| self.omega_by_index(a, b))
    }

    /// `ω_e / ℓ_e` for the edge at position `i`.
    pub fn ratio(&self, i: usize) -> f64 {
        self.ratios[i]
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn edge_ratio(&self, e: &EdgeId) -> Result<f64> {
        Ok(self.ratios[self.graph.edge_index(e)?])
    }

    /// `ω_e` across the endpoints of edge `i` (0 for a loop).
    pub fn edge_omega(&self, i: usize) -> f64 {
        let (a, b) = self.graph.endpoints(i);
        if self.bridges[i] {
            self.graph.edges()[i].length
        } else {
            self.omega_by_index(a, b)
        }
    }

    pub fn bridges(&self) -> &[bool] {
        &self.bridges
    }

    /// Unit current from `x` to `y`, by vertex index.
    pub fn current_by_index(&self, x: usize, y: usize) -> Vec<f64> {
        let g = &self.graph;
        let potentials = match &self.grounded {
            Some(grounded) => grounded.dipole_potentials(x, y),
            None => (0..g.vertex_count()).map(|z| self.green[(z, x)] - self.green[(z, y)]).collect(),
        };
        let phi = |z: usize| potentials[z];
        g.edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (a, b) = g.endpoints(i);
                if a == b {
                    0.0
                } else if let Some(side) = &self.bridge_sides[i] {
                    // all of the current crosses a separating bridge, none crosses any other
                    match (side[x], side[y]) {
                        (true, false) => 1.0,
                        (false, true) => -1.0,
                        _ => 0.0,
                    }
                } else {
                    (phi(a) - phi(b)) / e.length
                }
            })
            .collect()
    }

    pub fn unit_current(&self, x: &VertexId, y: &VertexId) -> Result<CurrentVector> {
        let (xi, yi) = self.source_sink(x, y)?;
        Ok(CurrentVector {
            source: x.clone(),
            sink: y.clone(),
            edges: self.graph.edges().iter().map(|e| e.id.clone()).collect(),
            currents: self.current_by_index(xi, yi),
        })
    }

    /// `∂ω_xy / ∂ℓ_f = (i_f^{xy})²` for every edge `f`, in edge order.
    pub fn gradient(&self, x: &VertexId, y: &VertexId) -> Result<Vec<f64>> {
        let (xi, yi) = self.source_sink(x, y)?;
        Ok(self.gradient_by_index(xi, yi))
    }

    pub fn gradient_by_index(&self, x: usize, y: usize) -> Vec<f64> {
        self.current_by_index(x, y).into_iter().map(|i| i * i).collect()
    }

    fn source_sink(&self, x: &VertexId, y: &VertexId) -> Result<(usize, usize)> {
        let xi = self.graph.vertex_index(x)?;
        let yi = self.graph.vertex_index(y)?;
        if xi == yi {
            return Err(Error::SameVertex(x.to_string()));
        }
        Ok((xi, yi))
    }
}

/// Signed per-edge current (oriented `u → v`) of one unit sent from source to sink.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentVector {
    pub source: VertexId,
    pub sink: VertexId,
    pub edges: Vec<EdgeId>,
    pub currents: Vec<f64>,
}

impl CurrentVector {
    pub fn get(&self, e: &EdgeId) -> Option<f64> {
        self.edges.iter().position(|x| x == e).map(|i| self.currents[i])
    }

    /// Largest violation of Kirchhoff's current law over all vertices.
    pub fn kirchhoff_residual(&self, g: &WeightedGraph) -> Result<f64> {
        let mut net = vec![0.0; g.vertex_count()];
        for (i, &c) in self.currents.iter().enumerate() {
            let (a, b) = g.endpoints(i);
            net[a] += c;
            net[b] -= c;
        }
        net[g.vertex_index(&self.source)?] -= 1.0;
        net[g.vertex_index(&self.sink)?] += 1.0;
        Ok(net.iter().fold(0.0_f64, |m, r| m.max(r.abs())))
    }
}

pub fn resistance_profile(g: &WeightedGraph) -> Result<ResistanceProfile> {
    ResistanceProfile::new(g)
}

pub fn unit_current(g: &WeightedGraph, x: &VertexId, y: &VertexId) -> Result<CurrentVector> {
    ResistanceProfile::new(g)?.unit_current(x, y)
}

pub fn resistance_gradient(g: &WeightedGraph, x: &VertexId, y: &VertexId) -> Result<Vec<f64>> {
    ResistanceProfile::new(g)?.gradient(x, y)
}

/// Weighted spanning-tree polynomial `τ(G; ℓ) = Σ_T Π_{e ∉ T} ℓ_e`.
pub fn tree_polynomial(g: &WeightedGraph) -> Result<f64> {
    check_cap(g, TREE_ENUMERATION_CAP)?;
    let ends: Vec<_> = (0..g.edge_count()).map(|i| g.endpoints(i)).collect();
    Ok(tau(g.vertex_count(), &ends, &g.lengths()))
}

/// Effective resistance as the spanning-tree ratio `τ(G/xy) / τ(G)`.
pub fn resistance_by_trees(g: &WeightedGraph, x: &VertexId, y: &VertexId) -> Result<f64> {
    resistance_by_trees_with_cap(g, x, y, TREE_ENUMERATION_CAP)
}

pub fn resistance_by_trees_with_cap(g: &WeightedGraph, x: &VertexId, y: &VertexId, cap: usize) -> Result<f64> {
    check_cap(g, cap)?;
    let xi = g.vertex_index(x)?;
    let yi = g.vertex_index(y)?;
    if xi == yi {
        return Ok(0.0);
    }
    // Loops of G multiply every term of both polynomials; cancel them here.
    let mut ends = Vec::new();
    let mut lengths = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        let (a, b) = g.endpoints(i);
        if a != b {
            ends.push((a, b));
            lengths.push(e.length);
        }
    }
    let n = g.vertex_count();
    let full = tau(n, &ends, &lengths);
    // G/xy: relabel y as x and close the gap left by y.
    let squash = |z: usize| {
        let z = if z == yi { xi } else { z };
        if z > yi {
            z - 1
        } else {
            z
        }
    };
    let merged: Vec<_> = ends.iter().map(|&(a, b)| (squash(a), squash(b))).collect();
    let quotient = tau(n - 1, &merged, &lengths);
    Ok(quotient / full)
}

fn check_cap(g: &WeightedGraph, cap: usize) -> Result<()> {
    let edges = g.non_loop_edge_count();
    if edges > cap {
        return Err(Error::InstanceTooLarge { edges, cap });
    }
    Ok(())
}

/// Σ over spanning trees of the product of lengths of edges outside the tree.
/// Loops never belong to a tree, so they always land in the product.
fn tau(n: usize, ends: &[(usize, usize)], lengths: &[f64]) -> f64 {
    let loop_product: f64 = ends
        .iter()
        .zip(lengths)
        .filter(|((a, b), _)| a == b)
        .map(|(_, l)| l)
        .product();
    let candidates: Vec<usize> = (0..ends.len()).filter(|&i| ends[i].0 != ends[i].1).collect();
    let mut chosen = vec![false; ends.len()];
    let mut total = 0.0;
    enumerate_trees(n, ends, &candidates, 0, n - 1, &mut chosen, &mut |chosen| {
        let outside: f64 = candidates
            .iter()
            .filter(|&&i| !chosen[i])
            .map(|&i| lengths[i])
            .product();
        total += outside;
    });
    total * loop_product
}

fn enumerate_trees(
    n: usize,
    ends: &[(usize, usize)],
    candidates: &[usize],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<bool>,
    visit: &mut dyn FnMut(&[bool]),
) {
    if remaining == 0 {
        if spans(n, ends, chosen) {
            visit(chosen);
        }
        return;
    }
    if candidates.len() - start < remaining {
        return;
    }
    for k in start..candidates.len() {
        chosen[candidates[k]] = true;
        enumerate_trees(n, ends, candidates, k + 1, remaining - 1, chosen, visit);
        chosen[candidates[k]] = false;
    }
}

/// True when the chosen n − 1 edges are acyclic (hence a spanning tree).
fn spans(n: usize, ends: &[(usize, usize)], chosen: &[bool]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, &(a, b)) in ends.iter().enumerate() {
        if chosen[i] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
    }
    true
}
