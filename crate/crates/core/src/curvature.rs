//! Ricci–Foster curvature.
//!
//! On an edge `e = uv`:
//!
//! ```text
//! K_e = 1/deg_u + 1/deg_v − ω_uv / ℓ_e
//! ```
//!
//! The Foster coefficient is `F(e) = 1 − ω_e / ℓ_e`, which equals
//! `ℓ_e / (ℓ_e + ω_e(G \ e))` by the parallel rule, so `K_e` can also be read
//! as `1/deg_u + 1/deg_v − 1 + F(e)`. Each edge splits into two arcs with
//! `K_{u→v} = 1/deg_u − ½ ω_uv/ℓ_e`, and the scalar curvature of a vertex is
//! the sum over its outgoing arcs. A loop has ratio 0 and contributes two
//! arcs at its vertex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::resistance::{pinned_ratios, GroundedLaplacian, ResistanceProfile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeCurvature {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
    /// `ω_e / ℓ_e`
    pub ratio: f64,
    pub curvature: f64,
    pub foster: f64,
    /// `K_{u→v}`
    pub arc_forward: f64,
    /// `K_{v→u}`
    pub arc_backward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexCurvature {
    pub id: VertexId,
    pub degree: usize,
    pub scalar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub edges: Vec<EdgeCurvature>,
    pub vertices: Vec<VertexCurvature>,
    pub total_curvature: f64,
    pub total_foster: f64,
    pub total_scalar: f64,
}

impl CurvatureReport {
    pub fn from_profile(profile: &ResistanceProfile) -> Self {
        let g = profile.graph();
        let deg = g.degrees();
        let mut scalar = vec![0.0; g.vertex_count()];
        let edges: Vec<EdgeCurvature> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (a, b) = g.endpoints(i);
                let ratio = profile.ratio(i);
                let arc_forward = 1.0 / deg[a] as f64 - 0.5 * ratio;
                let arc_backward = 1.0 / deg[b] as f64 - 0.5 * ratio;
                scalar[a] += arc_forward;
                scalar[b] += arc_backward;
                EdgeCurvature {
                    id: e.id.clone(),
                    u: e.u.clone(),
                    v: e.v.clone(),
                    length: e.length,
                    ratio,
                    curvature: 1.0 / deg[a] as f64 + 1.0 / deg[b] as f64 - ratio,
                    foster: 1.0 - ratio,
                    arc_forward,
                    arc_backward,
                }
            })
            .collect();
        if g.is_point() {
            scalar[0] = 1.0;
        }
        let vertices = g
            .vertices()
            .iter()
            .zip(&deg)
            .zip(&scalar)
            .map(|((id, &degree), &scalar)| VertexCurvature {
                id: id.clone(),
                degree,
                scalar,
            })
            .collect();
        Self {
            total_curvature: edges.iter().map(|e| e.curvature).sum(),
            total_foster: edges.iter().map(|e| e.foster).sum(),
            total_scalar: scalar.iter().sum(),
            edges,
            vertices,
        }
    }

    pub fn curvatures(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.curvature).collect()
    }

    pub fn edge(&self, e: &EdgeId) -> Option<&EdgeCurvature> {
        self.edges.iter().find(|x| &x.id == e)
    }
}

pub fn curvature_report(g: &WeightedGraph) -> Result<CurvatureReport> {
    Ok(CurvatureReport::from_profile(&ResistanceProfile::new(g)?))
}

pub fn curvature_of_edge(g: &WeightedGraph, e: &EdgeId) -> Result<f64> {
    let i = g.edge_index(e)?;
    Ok(edge_curvatures(g, &g.lengths())?[i])
}

/// Precomputed topology for evaluating `K(ℓ)` repeatedly on a fixed graph.
#[derive(Debug, Clone)]
pub(crate) struct CurvatureKernel {
    n: usize,
    ends: Vec<(usize, usize)>,
    bridges: Vec<bool>,
    degree_terms: Vec<f64>,
}

impl CurvatureKernel {
    pub(crate) fn new(g: &WeightedGraph) -> Self {
        let deg = g.degrees();
        let ends: Vec<_> = (0..g.edge_count()).map(|i| g.endpoints(i)).collect();
        let degree_terms = ends
            .iter()
            .map(|&(a, b)| 1.0 / deg[a] as f64 + 1.0 / deg[b] as f64)
            .collect();
        Self {
            n: g.vertex_count(),
            ends,
            bridges: g.bridges(),
            degree_terms,
        }
    }

    pub(crate) fn curvatures(&self, lengths: &[f64]) -> Result<Vec<f64>> {
        if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::NumericalFailure("curvature requested at non-positive length".into()));
        }
        let grounded = GroundedLaplacian::new(self.n, &self.ends, lengths)?;
        let ratios = pinned_ratios(|a, b| grounded.dipole_resistance(a, b), &self.ends, lengths, &self.bridges);
        Ok(self
            .degree_terms
            .iter()
            .zip(ratios)
            .map(|(d, r)| d - r)
            .collect())
    }
}

/// `K_e` for every edge of `g`'s topology at the given lengths.
pub fn edge_curvatures(g: &WeightedGraph, lengths: &[f64]) -> Result<Vec<f64>> {
    if lengths.len() != g.edge_count() {
        return Err(Error::InvalidConfig(format!(
            "expected {} lengths, got {}",
            g.edge_count(),
            lengths.len()
        )));
    }
    CurvatureKernel::new(g).curvatures(lengths)
}

/// `∂K_e / ∂ℓ_f` for every edge `f`, in edge order, from the closed forms
///
/// ```text
/// ∂K_e/∂ℓ_e = w / (ℓ_e + w)²
/// ∂K_e/∂ℓ_f = −ℓ_e / (ℓ_e + w)² · ∂w/∂ℓ_f     (f ≠ e)
/// ```
///
/// with `w = ω_e(G \ e)` and `∂w/∂ℓ_f` the squared unit current in `G \ e`.
/// Loops and bridges have length-independent curvature and give all zeros.
pub fn curvature_partials(g: &WeightedGraph, e: &EdgeId) -> Result<Vec<f64>> {
    let idx = g.edge_index(e)?;
    let mut out = vec![0.0; g.edge_count()];
    let rec = &g.edges()[idx];
    if rec.is_loop() || g.bridges()[idx] {
        return Ok(out);
    }
    let deleted = g.without_edge(e)?;
    let profile = ResistanceProfile::new(&deleted)?;
    let (a, b) = g.endpoints(idx);
    let w = profile.omega_by_index(a, b);
    let grad = profile.gradient_by_index(a, b);
    let len = rec.length;
    let denom = (len + w) * (len + w);
    // G \ e keeps vertex order and drops position idx from the edge list
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = match j.cmp(&idx) {
            std::cmp::Ordering::Equal => w / denom,
            std::cmp::Ordering::Less => -len / denom * grad[j],
            std::cmp::Ordering::Greater => -len / denom * grad[j - 1],
        };
    }
    Ok(out)
}

/// Both sides of subdivision additivity for curvature and Foster coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubdivisionCheck {
    /// `K_e` on the original graph.
    pub curvature_parent: f64,
    /// `K_{e₁} + K_{e₂}` on the subdivided graph.
    pub curvature_children: f64,
    pub foster_parent: f64,
    pub foster_children: f64,
}

impl SubdivisionCheck {
    pub fn max_violation(&self) -> f64 {
        (self.curvature_parent - self.curvature_children)
            .abs()
            .max((self.foster_parent - self.foster_children).abs())
    }
}

pub fn verify_subdivision_additivity(g: &WeightedGraph, e: &EdgeId, split: f64) -> Result<SubdivisionCheck> {
    let h = g.subdivide(e, split)?;
    let idx = g.edge_index(e)?;
    let before = curvature_report(g)?;
    let after = curvature_report(&h)?;
    // subdivide puts e₁, e₂ at positions idx, idx + 1
    let (c1, c2) = (&after.edges[idx], &after.edges[idx + 1]);
    Ok(SubdivisionCheck {
        curvature_parent: before.edges[idx].curvature,
        curvature_children: c1.curvature + c2.curvature,
        foster_parent: before.edges[idx].foster,
        foster_children: c1.foster + c2.foster,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn assert_curvatures(g: &WeightedGraph, expected: &[f64]) {
        let r = curvature_report(g).unwrap();
        for (e, &k) in r.edges.iter().zip(expected) {
            assert_abs_diff_eq!(e.curvature, k, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.total_curvature, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tree_with_branch() {
        assert_curvatures(
            &fixtures::branched_path(),
            &[1.0 / 2.0, -1.0 / 6.0, -1.0 / 6.0, 0.0, 1.0 / 2.0, 1.0 / 3.0],
        );
    }

    #[test]
    fn house() {
        assert_curvatures(
            &fixtures::house(),
            &[3.0 / 11.0, 7.0 / 66.0, 4.0 / 33.0, 7.0 / 66.0, 13.0 / 66.0, 13.0 / 66.0],
        );
    }

    #[test]
    fn barbell() {
        let t = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0];
        let mut expected = t.to_vec();
        expected.push(-1.0 / 3.0);
        expected.extend(t);
        assert_curvatures(&fixtures::barbell(), &expected);
    }

    #[test]
    fn theta() {
        assert_curvatures(&fixtures::theta(), &[16.0 / 33.0, 4.0 / 33.0, 13.0 / 33.0]);
    }

    #[test]
    fn minimal_barbell_loops() {
        assert_curvatures(&fixtures::barbell_minimal(), &[2.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn cycles() {
        for n in 3..8 {
            let g = fixtures::cycle(&vec![1.0; n]);
            for e in g.edges() {
                assert_abs_diff_eq!(curvature_of_edge(&g, &e.id).unwrap(), 1.0 / n as f64, epsilon = 1e-12);
            }
        }
        let lens = [0.5, 2.0, 1.5, 4.0];
        let g = fixtures::cycle(&lens);
        let total: f64 = lens.iter().sum();
        for (e, l) in g.edges().iter().zip(lens) {
            assert_abs_diff_eq!(curvature_of_edge(&g, &e.id).unwrap(), l / total, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_vertex_loops() {
        let g = WeightedGraph::from_edge_list(&[("a", "a", 1.0), ("a", "a", 2.0)]).unwrap();
        let r = curvature_report(&g).unwrap();
        assert_eq!(r.curvatures(), vec![0.5, 0.5]);
        assert_eq!(r.total_scalar, 1.0);
    }

    #[test]
    fn arcs_and_scalar() {
        let r = curvature_report(&fixtures::house()).unwrap();
        for e in &r.edges {
            assert_abs_diff_eq!(e.arc_forward + e.arc_backward, e.curvature, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(r.total_scalar, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.total_foster, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn partials_vanish_on_bridges() {
        let g = fixtures::barbell();
        assert!(curvature_partials(&g, &"e3".into()).unwrap().iter().all(|&x| x == 0.0));
        let l = fixtures::barbell_minimal();
        assert!(curvature_partials(&l, &"e0".into()).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn triangle_diagonal_partial() {
        let g = fixtures::cycle(&[1.0, 1.0, 1.0]);
        let p = curvature_partials(&g, &"e1".into()).unwrap();
        assert_abs_diff_eq!(p[1], 2.0 / 9.0, epsilon = 1e-14);
        // off-diagonal: −1/9 · (current 1 through the other path)² = −1/9
        assert_abs_diff_eq!(p[0], -1.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[2], -1.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn theta_subdivision() {
        let g = fixtures::theta();
        let c = verify_subdivision_additivity(&g, &"roof".into(), 0.5).unwrap();
        assert_abs_diff_eq!(c.curvature_parent, 13.0 / 33.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.curvature_children, 13.0 / 33.0, epsilon = 1e-12);
        assert!(c.max_violation() < 1e-12);
    }

    #[test]
    fn unknown_edge() {
        assert!(matches!(
            curvature_of_edge(&fixtures::house(), &"nope".into()),
            Err(Error::UnknownEdge(_))
        ));
    }
}
