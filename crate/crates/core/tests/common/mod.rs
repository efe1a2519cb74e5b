//! Brute-force isomorphism of small weighted multigraphs, independent of the
//! library's own structure code.

use ricci_foster::WeightedGraph;

/// Edge multiset under a vertex relabelling: sorted (min, max, length) triples.
fn signature(g: &WeightedGraph, perm: &[usize]) -> Vec<(usize, usize, u64)> {
    let mut sig: Vec<_> = (0..g.edge_count())
        .map(|i| {
            let (a, b) = g.endpoints(i);
            let (a, b) = (perm[a], perm[b]);
            // compare lengths to ~1e-9 relative
            let l = (g.edges()[i].length * 1e9).round() as u64;
            (a.min(b), a.max(b), l)
        })
        .collect();
    sig.sort_unstable();
    sig
}

fn permutations(n: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(p: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if p.len() == n {
            return f(p);
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                p.push(v);
                if rec(p, used, n, f) {
                    return true;
                }
                p.pop();
                used[v] = false;
            }
        }
        false
    }
    rec(&mut Vec::new(), &mut vec![false; n], n, f)
}

/// True if some vertex bijection maps the edge multiset of `a` onto that of
/// `b`, lengths included.
pub fn isomorphic(a: &WeightedGraph, b: &WeightedGraph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let n = a.vertex_count();
    assert!(n <= 9, "brute-force isomorphism is for small graphs");
    let target = signature(b, &(0..n).collect::<Vec<_>>());
    permutations(n, &mut |p| signature(a, p) == target)
}
