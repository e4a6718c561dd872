//! Permutation encoding of trees shared by every formulation.
//!
//! A tree on `positions` vertices is described by the order in which its
//! vertices join it. `x(v, i)` is set when vertex `v` sits at position `i`,
//! and `y(v, i)` is set when `v` attaches to the vertex at the earlier
//! position `i`. Positions, vertices and slack levels are 0-based here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::qubo::{Assignment, LinearExpr, QuboModel};

#[derive(Debug, Error, PartialEq)]
pub enum FormulationError {
    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("degree bound must be at least 1")]
    InvalidDelta,
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph needs at least {min} vertices, has {n}")]
    TooFewVertices { min: usize, n: usize },
    #[error("penalty weights must be positive and finite (lambda_a = {lambda_a}, lambda_b = {lambda_b})")]
    InvalidWeights { lambda_a: f64, lambda_b: f64 },
}

/// What a flat variable index stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VarRole {
    X { vertex: usize, position: usize },
    Y { vertex: usize, position: usize },
    Z { depth: usize, position: usize, bit: usize },
}

/// Bijection between semantic variables and flat bit indices.
///
/// Indices are laid out as the `x` block (vertex-major), the `y` block
/// (vertex-major), then one slack block per depth (position-major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableLayout {
    n: usize,
    positions: usize,
    slack_positions: usize,
    slack_widths: Vec<usize>,
    slack_offsets: Vec<usize>,
    total: usize,
}

impl VariableLayout {
    /// `slack_widths[d]` is the number of bits per position at depth `d`;
    /// slack covers positions `0..n-1`.
    pub fn new(n: usize, positions: usize, slack_widths: Vec<usize>) -> Self {
        assert!(positions >= 1 && positions <= n.max(1));
        let slack_positions = if slack_widths.is_empty() { 0 } else { n - 1 };
        let mut offsets = Vec::with_capacity(slack_widths.len());
        let mut next = n * positions + n * (positions - 1);
        for &w in &slack_widths {
            offsets.push(next);
            next += slack_positions * w;
        }
        VariableLayout {
            n,
            positions,
            slack_positions,
            slack_widths,
            slack_offsets: offsets,
            total: next,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn num_x(&self) -> usize {
        self.n * self.positions
    }

    pub fn num_y(&self) -> usize {
        self.n * (self.positions - 1)
    }

    pub fn slack_depths(&self) -> usize {
        self.slack_widths.len()
    }

    pub fn slack_positions(&self) -> usize {
        self.slack_positions
    }

    pub fn slack_width(&self, depth: usize) -> usize {
        self.slack_widths[depth]
    }

    #[inline]
    pub fn x(&self, vertex: usize, position: usize) -> usize {
        debug_assert!(vertex < self.n && position < self.positions);
        vertex * self.positions + position
    }

    #[inline]
    pub fn y(&self, vertex: usize, position: usize) -> usize {
        debug_assert!(vertex < self.n && position + 1 < self.positions);
        self.num_x() + vertex * (self.positions - 1) + position
    }

    #[inline]
    pub fn slack(&self, depth: usize, position: usize, bit: usize) -> usize {
        debug_assert!(position < self.slack_positions && bit < self.slack_widths[depth]);
        self.slack_offsets[depth] + position * self.slack_widths[depth] + bit
    }

    pub fn role(&self, index: usize) -> Option<VarRole> {
        if index >= self.total {
            return None;
        }
        if index < self.num_x() {
            return Some(VarRole::X {
                vertex: index / self.positions,
                position: index % self.positions,
            });
        }
        if index < self.num_x() + self.num_y() {
            let r = index - self.num_x();
            let per = self.positions - 1;
            return Some(VarRole::Y {
                vertex: r / per,
                position: r % per,
            });
        }
        let depth = self.slack_offsets.iter().rposition(|&o| o <= index)?;
        let r = index - self.slack_offsets[depth];
        let w = self.slack_widths[depth];
        Some(VarRole::Z {
            depth,
            position: r / w,
            bit: r % w,
        })
    }

    pub fn index_of(&self, role: VarRole) -> usize {
        match role {
            VarRole::X { vertex, position } => self.x(vertex, position),
            VarRole::Y { vertex, position } => self.y(vertex, position),
            VarRole::Z { depth, position, bit } => self.slack(depth, position, bit),
        }
    }

    /// Slack bits of `depth` at `position`, read from `a`.
    pub fn slack_bits(&self, a: &Assignment, depth: usize, position: usize) -> Vec<bool> {
        (0..self.slack_widths[depth])
            .map(|j| a.get(self.slack(depth, position, j)))
            .collect()
    }

    /// JSON sidecar describing every variable, with 1-based vertex,
    /// position and depth labels.
    pub fn to_sidecar_json(&self, problem: &str) -> String {
        let variables: Vec<SidecarEntry> = (0..self.total)
            .map(|index| SidecarEntry::from_role(index, self.role(index).unwrap()))
            .collect();
        let doc = Sidecar {
            problem: problem.to_string(),
            n: self.n,
            positions: self.positions,
            num_vars: self.total,
            variables,
        };
        serde_json::to_string_pretty(&doc).expect("sidecar serializes")
    }
}

/// On-disk form of a [`VariableLayout`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub problem: String,
    pub n: usize,
    pub positions: usize,
    pub num_vars: usize,
    pub variables: Vec<SidecarEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidecarEntry {
    pub index: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    pub position: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bit: Option<usize>,
}

impl SidecarEntry {
    fn from_role(index: usize, role: VarRole) -> Self {
        let (kind, vertex, position, depth, bit) = match role {
            VarRole::X { vertex, position } => ("x", Some(vertex + 1), position + 1, None, None),
            VarRole::Y { vertex, position } => ("y", Some(vertex + 1), position + 1, None, None),
            VarRole::Z { depth, position, bit } => ("z", None, position + 1, Some(depth + 1), Some(bit)),
        };
        SidecarEntry {
            index,
            kind: kind.to_string(),
            vertex,
            position,
            depth,
            bit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    lambda_a: f64,
    lambda_b: f64,
}

impl PenaltyWeights {
    pub fn new(lambda_a: f64, lambda_b: f64) -> Result<Self, FormulationError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(lambda_a) || !ok(lambda_b) {
            return Err(FormulationError::InvalidWeights { lambda_a, lambda_b });
        }
        Ok(PenaltyWeights { lambda_a, lambda_b })
    }

    /// `lambda_b` with the default constraint penalty for `g`.
    pub fn with_default_a(g: &Graph, lambda_b: f64, weighted: bool) -> Result<Self, FormulationError> {
        Self::new(default_lambda_a(g, lambda_b, weighted), lambda_b)
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }
}

/// One above the penalty lower bound: `lambda_b * n * max_w + 1` for
/// weighted problems, `lambda_b * n + 1` for leaf counting.
///
/// An edgeless graph counts as `max_w = 0`.
pub fn default_lambda_a(g: &Graph, lambda_b: f64, weighted: bool) -> f64 {
    let n = g.n() as f64;
    if weighted {
        lambda_b * n * g.max_weight().unwrap_or(0.0) + 1.0
    } else {
        lambda_b * n + 1.0
    }
}

/// A named piece of a Hamiltonian. Summing all fragments of a formulation
/// gives its model.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub name: &'static str,
    pub model: QuboModel,
}

/// Merges fragments into one finalized model.
pub fn sum_fragments(num_vars: usize, fragments: &[Fragment]) -> QuboModel {
    let mut m = QuboModel::new(num_vars);
    for f in fragments {
        m.merge(&f.model);
    }
    m.finalize();
    m
}

/// Prices tree edges and penalizes non-edges over positions `0..upto`.
///
/// Each undirected edge contributes on both orientations
/// `x(u, i) y(v, i)` and `x(v, i) y(u, i)`; a valid encoding activates at
/// most one of them.
pub fn edge_cost_terms(m: &mut QuboModel, layout: &VariableLayout, g: &Graph, w: &PenaltyWeights, upto: usize) {
    assert!(upto < layout.positions());
    for e in g.edges() {
        for i in 0..upto {
            let c = w.lambda_b() * e.weight;
            m.add_quadratic(layout.x(e.u, i), layout.y(e.v, i), c);
            m.add_quadratic(layout.x(e.v, i), layout.y(e.u, i), c);
        }
    }
    invalid_edge_terms(m, layout, g, w.lambda_a(), upto);
}

/// `lambda_a * x(u, i) y(v, i)` for every ordered pair `u != v` that is not
/// an edge.
pub fn invalid_edge_terms(m: &mut QuboModel, layout: &VariableLayout, g: &Graph, lambda_a: f64, upto: usize) {
    assert!(upto < layout.positions());
    let n = layout.n();
    for u in 0..n {
        for v in (0..n).filter(|&v| v != u && !g.has_edge(u, v)) {
            for i in 0..upto {
                m.add_quadratic(layout.x(u, i), layout.y(v, i), lambda_a);
            }
        }
    }
}

/// Every vertex in exactly one position and every position holding exactly
/// one vertex. Requires `positions == n`.
pub fn permutation_constraints_exact(m: &mut QuboModel, layout: &VariableLayout, w: &PenaltyWeights) {
    let n = layout.n();
    assert_eq!(layout.positions(), n);
    for v in 0..n {
        let mut e = LinearExpr::new(1.0);
        for i in 0..n {
            e.add(layout.x(v, i), -1.0);
        }
        m.add_penalty_square(&e, w.lambda_a());
    }
    for i in 0..n {
        let mut e = LinearExpr::new(1.0);
        for v in 0..n {
            e.add(layout.x(v, i), -1.0);
        }
        m.add_penalty_square(&e, w.lambda_a());
    }
}

/// k-of-n placement: pairwise same-position and same-vertex penalties plus
/// exactly one vertex per position. The pairwise same-position term overlaps
/// the squared term and is kept anyway.
pub fn permutation_constraints_kcard(m: &mut QuboModel, layout: &VariableLayout, w: &PenaltyWeights) {
    let (n, k) = (layout.n(), layout.positions());
    let la = w.lambda_a();
    for v in 0..n {
        for u in v + 1..n {
            for i in 0..k {
                m.add_quadratic(layout.x(u, i), layout.x(v, i), la);
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            for v in 0..n {
                m.add_quadratic(layout.x(v, i), layout.x(v, j), la);
            }
        }
    }
    for i in 0..k {
        let mut e = LinearExpr::new(1.0);
        for v in 0..n {
            e.add(layout.x(v, i), -1.0);
        }
        m.add_penalty_square(&e, la);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionVariant {
    /// Absent vertices are allowed and must have no parent.
    KCardinality,
    /// Every vertex is placed; all but the root have exactly one parent.
    Full,
}

/// Parents must come strictly earlier, and each placed non-root vertex has
/// exactly one parent.
pub fn connection_constraints(
    m: &mut QuboModel,
    layout: &VariableLayout,
    w: &PenaltyWeights,
    variant: ConnectionVariant,
) {
    let (n, p) = (layout.n(), layout.positions());
    let la = w.lambda_a();
    // pointing at one's own position counts as pointing ahead
    for u in 0..n {
        for i in 1..p {
            for j in i..p - 1 {
                m.add_quadratic(layout.x(u, i), layout.y(u, j), la);
            }
        }
    }
    for v in 0..n {
        let mut e = match variant {
            ConnectionVariant::KCardinality => {
                let mut e = LinearExpr::new(0.0);
                for i in 1..p {
                    e.add(layout.x(v, i), 1.0);
                }
                e
            }
            ConnectionVariant::Full => LinearExpr::new(1.0).with(layout.x(v, 0), -1.0),
        };
        for i in 0..p - 1 {
            e.add(layout.y(v, i), -1.0);
        }
        m.add_penalty_square(&e, la);
    }
}

/// A tree read off the `x`/`y` bits: `order[p]` is the vertex at position
/// `p`, `parent[p]` the position it attaches to (`None` for the root).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecodedPermutation {
    pub order: Vec<usize>,
    pub parent: Vec<Option<usize>>,
}

impl DecodedPermutation {
    pub fn position_of(&self, vertex: usize) -> Option<usize> {
        self.order.iter().position(|&v| v == vertex)
    }

    /// Parent position of `vertex`, if it is placed and not the root.
    pub fn parent_position_of(&self, vertex: usize) -> Option<usize> {
        self.position_of(vertex).and_then(|p| self.parent[p])
    }

    /// Tree edges as `(child, parent)` vertex pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.order.len())
            .filter_map(|p| self.parent[p].map(|q| (self.order[p], self.order[q])))
            .collect()
    }

    /// Number of later positions attached to position `p`.
    pub fn children(&self, p: usize) -> usize {
        self.parent.iter().filter(|&&q| q == Some(p)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct InvalidEncoding(pub String);

/// Reads the permutation and parent choices, or explains why the bits do
/// not describe one.
pub fn decode_permutation(layout: &VariableLayout, a: &Assignment) -> Result<DecodedPermutation, InvalidEncoding> {
    let (n, k) = (layout.n(), layout.positions());
    let invalid = |msg: String| Err(InvalidEncoding(msg));

    let mut order = Vec::with_capacity(k);
    for i in 0..k {
        let here: Vec<usize> = (0..n).filter(|&v| a.get(layout.x(v, i))).collect();
        match here.as_slice() {
            [v] => order.push(*v),
            [] => return invalid(format!("empty position {}", i + 1)),
            many => return invalid(format!("position {} holds {} vertices", i + 1, many.len())),
        }
    }
    let mut position_of = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        if let Some(prev) = position_of[v] {
            return invalid(format!(
                "vertex {} placed at positions {} and {}",
                v + 1,
                prev + 1,
                i + 1
            ));
        }
        position_of[v] = Some(i);
    }

    let mut parent = vec![None; k];
    for (v, &placed) in position_of.iter().enumerate() {
        let bits: Vec<usize> = (0..k - 1).filter(|&i| a.get(layout.y(v, i))).collect();
        match placed {
            None if !bits.is_empty() => {
                return invalid(format!("absent vertex {} has parent bits", v + 1));
            }
            None => {}
            Some(0) if !bits.is_empty() => {
                return invalid(format!("root vertex {} has parent bits", v + 1));
            }
            Some(0) => {}
            Some(p) => match bits.as_slice() {
                [q] if *q < p => parent[p] = Some(*q),
                [q] => {
                    return invalid(format!(
                        "vertex {} at position {} points to position {} at or after itself",
                        v + 1,
                        p + 1,
                        q + 1
                    ))
                }
                _ => {
                    return invalid(format!(
                        "vertex {} at position {} has {} parent bits",
                        v + 1,
                        p + 1,
                        bits.len()
                    ))
                }
            },
        }
    }
    Ok(DecodedPermutation { order, parent })
}

/// The `x`/`y` bits of `perm`; slack bits are left at zero.
pub fn encode_permutation(layout: &VariableLayout, perm: &DecodedPermutation) -> Assignment {
    let mut a = Assignment::zeros(layout.total());
    for (p, &v) in perm.order.iter().enumerate() {
        a.set(layout.x(v, p), true);
        if let Some(q) = perm.parent[p] {
            a.set(layout.y(v, q), true);
        }
    }
    a
}

/// Every insertion order of a tree in which each prefix stays connected,
/// together with the induced parent positions.
///
/// `edges` are undirected pairs over `vertices`.
pub fn tree_orderings(vertices: &[usize], edges: &[(usize, usize)]) -> Vec<DecodedPermutation> {
    let adjacent = |a: usize, b: usize| edges.iter().any(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a));
    let mut out = Vec::new();
    let mut order = Vec::with_capacity(vertices.len());
    let mut parent = Vec::with_capacity(vertices.len());
    fn extend(
        vertices: &[usize],
        adjacent: &dyn Fn(usize, usize) -> bool,
        order: &mut Vec<usize>,
        parent: &mut Vec<Option<usize>>,
        out: &mut Vec<DecodedPermutation>,
    ) {
        if order.len() == vertices.len() {
            out.push(DecodedPermutation {
                order: order.clone(),
                parent: parent.clone(),
            });
            return;
        }
        for &v in vertices {
            if order.contains(&v) {
                continue;
            }
            let attach = if order.is_empty() {
                None
            } else {
                match order.iter().position(|&u| adjacent(u, v)) {
                    Some(q) => Some(q),
                    None => continue,
                }
            };
            order.push(v);
            parent.push(attach);
            extend(vertices, adjacent, order, parent, out);
            order.pop();
            parent.pop();
        }
    }
    extend(vertices, &adjacent, &mut order, &mut parent, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use std::collections::HashSet;

    fn k3() -> Graph {
        parse_graph("3 3\n1 2 1\n1 3 2\n2 3 3").unwrap()
    }

    fn p3() -> Graph {
        parse_graph("3 2\n1 2 1\n2 3 1").unwrap()
    }

    fn unit() -> PenaltyWeights {
        PenaltyWeights::new(10.0, 1.0).unwrap()
    }

    fn model_of(layout: &VariableLayout, f: impl FnOnce(&mut QuboModel)) -> QuboModel {
        let mut m = QuboModel::new(layout.total());
        f(&mut m);
        m
    }

    fn energy(m: &QuboModel, a: &Assignment) -> f64 {
        m.energy(a).unwrap()
    }

    #[test]
    fn default_lambda_examples() {
        assert_eq!(default_lambda_a(&k3(), 1.0, true), 10.0);
        assert_eq!(default_lambda_a(&k3(), 2.0, true), 19.0);
        let c5 = parse_graph("5 5\n1 2 7\n2 3 1\n3 4 1\n4 5 1\n5 1 1").unwrap();
        assert_eq!(default_lambda_a(&c5, 1.0, false), 6.0);
    }

    #[test]
    fn layout_maps_are_bijections() {
        for n in 1..=8 {
            for positions in 1..=n {
                for widths in [vec![], vec![1], vec![3], vec![3, 2], vec![4, 3, 2]] {
                    if !widths.is_empty() && positions != n {
                        continue;
                    }
                    let l = VariableLayout::new(n, positions, widths.clone());
                    let mut seen = HashSet::new();
                    for v in 0..n {
                        for i in 0..positions {
                            assert!(seen.insert(l.x(v, i)));
                        }
                    }
                    assert_eq!(seen.len(), n * positions);
                    for v in 0..n {
                        for i in 0..positions - 1 {
                            assert!(seen.insert(l.y(v, i)));
                        }
                    }
                    assert_eq!(seen.len(), l.num_x() + l.num_y());
                    for (d, &w) in widths.iter().enumerate() {
                        for i in 0..l.slack_positions() {
                            for j in 0..w {
                                assert!(seen.insert(l.slack(d, i, j)));
                            }
                        }
                    }
                    assert_eq!(seen.len(), l.total());
                    assert!(seen.iter().all(|&i| i < l.total()));
                    for idx in 0..l.total() {
                        assert_eq!(l.index_of(l.role(idx).unwrap()), idx);
                    }
                    assert_eq!(l.role(l.total()), None);
                }
            }
        }
    }

    #[test]
    fn edge_costs_price_tree_weight() {
        let g = k3();
        let l = VariableLayout::new(3, 3, vec![]);
        let m = model_of(&l, |m| edge_cost_terms(m, &l, &g, &unit(), 2));
        // every ordering of every spanning tree of K3
        for (edges, weight) in [
            (vec![(0, 1), (0, 2)], 3.0),
            (vec![(0, 1), (1, 2)], 4.0),
            (vec![(0, 2), (1, 2)], 5.0),
        ] {
            for perm in tree_orderings(&[0, 1, 2], &edges) {
                assert_eq!(energy(&m, &encode_permutation(&l, &perm)), weight);
            }
        }
    }

    #[test]
    fn missing_edge_costs_lambda_a() {
        let g = p3();
        let l = VariableLayout::new(3, 3, vec![]);
        let m = model_of(&l, |m| edge_cost_terms(m, &l, &g, &unit(), 2));
        let mut a = Assignment::zeros(l.total());
        a.set(l.x(0, 0), true);
        a.set(l.y(2, 0), true);
        assert_eq!(energy(&m, &a), 10.0);

        let empty = Graph::new(3, []).unwrap();
        let m = model_of(&l, |m| edge_cost_terms(m, &l, &empty, &unit(), 2));
        assert_eq!(energy(&m, &Assignment::zeros(l.total())), 0.0);
    }

    #[test]
    fn exact_permutation_penalties() {
        let l = VariableLayout::new(3, 3, vec![]);
        let m = model_of(&l, |m| permutation_constraints_exact(m, &l, &unit()));
        let mut id = Assignment::zeros(l.total());
        for v in 0..3 {
            id.set(l.x(v, v), true);
        }
        assert_eq!(energy(&m, &id), 0.0);
        assert_eq!(energy(&m, &Assignment::zeros(l.total())), 60.0);
        let mut twice = id.clone();
        twice.set(l.x(0, 1), true);
        assert!(energy(&m, &twice) >= 10.0);
    }

    #[test]
    fn kcard_permutation_penalties() {
        let l = VariableLayout::new(3, 2, vec![]);
        let m = model_of(&l, |m| permutation_constraints_kcard(m, &l, &unit()));
        let mut ok = Assignment::zeros(l.total());
        ok.set(l.x(0, 0), true);
        ok.set(l.x(1, 1), true);
        assert_eq!(energy(&m, &ok), 0.0);

        let mut crowded = Assignment::zeros(l.total());
        crowded.set(l.x(0, 0), true);
        crowded.set(l.x(1, 0), true);
        assert!(energy(&m, &crowded) >= 20.0);

        let mut twice = Assignment::zeros(l.total());
        twice.set(l.x(0, 0), true);
        twice.set(l.x(0, 1), true);
        assert!(energy(&m, &twice) >= 10.0);
    }

    #[test]
    fn connection_penalties() {
        let l = VariableLayout::new(3, 3, vec![]);
        let full = model_of(&l, |m| connection_constraints(m, &l, &unit(), ConnectionVariant::Full));
        let path = DecodedPermutation {
            order: vec![0, 1, 2],
            parent: vec![None, Some(0), Some(1)],
        };
        assert_eq!(energy(&full, &encode_permutation(&l, &path)), 0.0);

        let l4 = VariableLayout::new(4, 4, vec![]);
        let full4 = model_of(&l4, |m| {
            connection_constraints(m, &l4, &unit(), ConnectionVariant::Full)
        });
        let mut ahead = Assignment::zeros(l4.total());
        ahead.set(l4.x(1, 1), true);
        ahead.set(l4.y(1, 2), true);
        assert!(energy(&full4, &ahead) >= 10.0);

        let lk = VariableLayout::new(3, 2, vec![]);
        let kc = model_of(&lk, |m| {
            connection_constraints(m, &lk, &unit(), ConnectionVariant::KCardinality)
        });
        let mut stray = Assignment::zeros(lk.total());
        stray.set(lk.x(0, 0), true);
        stray.set(lk.x(1, 1), true);
        stray.set(lk.y(1, 0), true);
        assert_eq!(energy(&kc, &stray), 0.0);
        stray.set(lk.y(2, 0), true);
        assert!(energy(&kc, &stray) >= 10.0);
    }

    #[test]
    fn decode_examples() {
        let l = VariableLayout::new(3, 3, vec![]);
        let path = DecodedPermutation {
            order: vec![0, 1, 2],
            parent: vec![None, Some(0), Some(1)],
        };
        let a = encode_permutation(&l, &path);
        let d = decode_permutation(&l, &a).unwrap();
        assert_eq!(d, path);
        assert_eq!(d.parent_position_of(1), Some(0));
        assert_eq!(d.parent_position_of(2), Some(1));
        assert_eq!(d.edges(), vec![(1, 0), (2, 1)]);

        assert_eq!(
            decode_permutation(&l, &Assignment::zeros(l.total())),
            Err(InvalidEncoding("empty position 1".into()))
        );
        let mut two = a.clone();
        two.set(l.x(1, 0), true);
        assert!(decode_permutation(&l, &two).is_err());
    }

    /// Brute force over all x/y patterns at n = 3: whenever decoding fails,
    /// the permutation and connection fragments charge at least lambda_a.
    #[test]
    fn invalid_decodes_are_penalized() {
        let w = unit();
        let cases = [
            (VariableLayout::new(3, 3, vec![]), ConnectionVariant::Full),
            (VariableLayout::new(3, 2, vec![]), ConnectionVariant::KCardinality),
            (VariableLayout::new(3, 3, vec![]), ConnectionVariant::KCardinality),
            (VariableLayout::new(3, 1, vec![]), ConnectionVariant::KCardinality),
        ];
        for (l, variant) in cases {
            let m = model_of(&l, |m| {
                match variant {
                    ConnectionVariant::Full => permutation_constraints_exact(m, &l, &w),
                    ConnectionVariant::KCardinality => permutation_constraints_kcard(m, &l, &w),
                }
                connection_constraints(m, &l, &w, variant);
            });
            for mask in 0..1u64 << l.total() {
                let a = Assignment::from_mask(mask, l.total());
                let e = energy(&m, &a);
                match decode_permutation(&l, &a) {
                    Ok(_) => assert_eq!(e, 0.0, "valid decode with penalty, mask {mask:b}"),
                    Err(_) => assert!(e >= w.lambda_a(), "mask {mask:b} energy {e}"),
                }
            }
        }
    }

    #[test]
    fn orderings_of_a_star() {
        // star centred on 0: centre first then any order, or a leaf then the centre
        let edges = [(0, 1), (0, 2), (0, 3)];
        let orders = tree_orderings(&[0, 1, 2, 3], &edges);
        assert_eq!(orders.len(), 6 + 3 * 2);
        for o in &orders {
            let mut got: Vec<(usize, usize)> = o.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
            got.sort();
            assert_eq!(got, edges.to_vec());
        }
    }

    #[test]
    fn sidecar_round_trips() {
        let l = VariableLayout::new(3, 3, vec![2]);
        let json = l.to_sidecar_json("dcmst");
        let doc: Sidecar = serde_json::from_str(&json).unwrap();
        assert_eq!(doc.num_vars, l.total());
        assert_eq!(doc.variables.len(), l.total());
        let z = &doc.variables[l.slack(0, 1, 1)];
        assert_eq!(
            (z.kind.as_str(), z.depth, z.position, z.bit),
            ("z", Some(1), 2, Some(1))
        );
        let y = &doc.variables[l.y(2, 0)];
        assert_eq!((y.kind.as_str(), y.vertex, y.position), ("y", Some(3), 1));
    }
}
