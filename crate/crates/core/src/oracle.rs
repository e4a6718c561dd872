//! Ground truth by classical algorithms and brute-force enumeration.
//!
//! Nothing here touches the QUBO side; it works on the graph alone.

use thiserror::Error;

use crate::graph::Graph;
use crate::mlst::LeafObjective;

/// Spanning-tree enumeration limit.
pub const MAX_ENUMERATION_VERTICES: usize = 8;
/// Subset enumeration limit for the k-cardinality oracle.
pub const MAX_SUBSET_VERTICES: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has {n} vertices, oracle limit is {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("need at least 2 vertices")]
    TooFewVertices,
    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Kruskal on the edges whose endpoints both lie in `keep`. Returns the
/// forest weight and the number of edges used.
fn kruskal(g: &Graph, keep: &[bool]) -> (f64, usize) {
    let mut edges: Vec<_> = g.edges().iter().filter(|e| keep[e.u] && keep[e.v]).collect();
    edges.sort_by(|a, b| a.weight.total_cmp(&b.weight));
    let mut uf = UnionFind::new(g.n());
    let mut total = 0.0;
    let mut used = 0;
    for e in edges {
        if uf.union(e.u, e.v) {
            total += e.weight;
            used += 1;
        }
    }
    (total, used)
}

pub fn oracle_mst(g: &Graph) -> Result<f64, OracleError> {
    let (w, used) = kruskal(g, &vec![true; g.n()]);
    if used + 1 < g.n() {
        return Err(OracleError::Disconnected);
    }
    Ok(w)
}

/// Cheapest tree on exactly `k` vertices, or `None` when no `k` vertices
/// induce a connected subgraph.
pub fn oracle_kmst(g: &Graph, k: usize) -> Result<Option<f64>, OracleError> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(OracleError::KOutOfRange { k, n });
    }
    if n > MAX_SUBSET_VERTICES {
        return Err(OracleError::TooLarge {
            n,
            cap: MAX_SUBSET_VERTICES,
        });
    }
    let mut best: Option<f64> = None;
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        let keep: Vec<bool> = (0..n).map(|v| (mask >> v) & 1 == 1).collect();
        let (w, used) = kruskal(g, &keep);
        if used + 1 == k && best.is_none_or(|b| w < b) {
            best = Some(w);
        }
    }
    Ok(best)
}

/// Every spanning tree as a list of edge indices into `g.edges()`, found by
/// filtering all `(n-1)`-edge subsets.
pub fn spanning_trees(g: &Graph) -> Result<Vec<Vec<usize>>, OracleError> {
    let n = g.n();
    if n > MAX_ENUMERATION_VERTICES {
        return Err(OracleError::TooLarge {
            n,
            cap: MAX_ENUMERATION_VERTICES,
        });
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    choose(g.num_edges(), n.saturating_sub(1), 0, &mut chosen, &mut |subset| {
        let mut uf = UnionFind::new(n);
        if subset.iter().all(|&i| uf.union(g.edges()[i].u, g.edges()[i].v)) {
            out.push(subset.to_vec());
        }
    });
    Ok(out)
}

fn choose(m: usize, r: usize, start: usize, chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if chosen.len() == r {
        f(chosen);
        return;
    }
    let need = r - chosen.len();
    if m < start + need {
        return;
    }
    for i in start..=m - need {
        chosen.push(i);
        choose(m, r, i + 1, chosen, f);
        chosen.pop();
    }
}

/// A tree on a vertex subset: `(vertices, edges)`.
pub type SubTree = (Vec<usize>, Vec<(usize, usize)>);

/// Every tree with exactly `k` vertices: spanning trees of each connected
/// induced `k`-vertex subgraph.
pub fn k_vertex_trees(g: &Graph, k: usize) -> Result<Vec<SubTree>, OracleError> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(OracleError::KOutOfRange { k, n });
    }
    if n > MAX_ENUMERATION_VERTICES {
        return Err(OracleError::TooLarge {
            n,
            cap: MAX_ENUMERATION_VERTICES,
        });
    }
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&v| (mask >> v) & 1 == 1).collect();
        let index: Vec<Option<usize>> = (0..n).map(|v| verts.iter().position(|&u| u == v)).collect();
        let sub = Graph::new(
            k,
            g.edges()
                .iter()
                .filter_map(|e| Some((index[e.u]?, index[e.v]?, e.weight))),
        )
        .expect("induced subgraph is simple");
        for tree in spanning_trees(&sub)? {
            let edges = tree
                .iter()
                .map(|&i| (verts[sub.edges()[i].u], verts[sub.edges()[i].v]))
                .collect();
            out.push((verts.clone(), edges));
        }
    }
    Ok(out)
}

fn tree_degrees(g: &Graph, tree: &[usize]) -> Vec<usize> {
    let mut deg = vec![0; g.n()];
    for &i in tree {
        deg[g.edges()[i].u] += 1;
        deg[g.edges()[i].v] += 1;
    }
    deg
}

/// Cheapest spanning tree with every degree at most `delta`, or `None`.
pub fn oracle_dcmst(g: &Graph, delta: usize) -> Result<Option<f64>, OracleError> {
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    Ok(spanning_trees(g)?
        .iter()
        .filter(|t| tree_degrees(g, t).iter().all(|&d| d <= delta))
        .map(|t| t.iter().map(|&i| g.edges()[i].weight).sum::<f64>())
        .reduce(f64::min))
}

/// Fewest or most leaves over all spanning trees.
pub fn oracle_leaves(g: &Graph, objective: LeafObjective) -> Result<usize, OracleError> {
    if g.n() < 2 {
        return Err(OracleError::TooFewVertices);
    }
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    let counts = spanning_trees(g)?
        .into_iter()
        .map(|t| tree_degrees(g, &t).iter().filter(|&&d| d == 1).count());
    let best = match objective {
        LeafObjective::Minimize => counts.min(),
        LeafObjective::Maximize => counts.max(),
    };
    Ok(best.expect("connected graph has a spanning tree"))
}
