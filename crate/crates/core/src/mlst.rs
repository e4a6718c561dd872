//! Minimum and maximum leaf spanning trees.
//!
//! Each position except the last carries a tower of counters. Level 0 holds
//! the number of children attached below the vertex at that position (its
//! degree minus one); every higher level holds the popcount of the level
//! beneath it. The widths shrink like an iterated logarithm until the top
//! level has two bits, and a vertex is a leaf exactly when both top bits are
//! clear.

use crate::encoding::{
    connection_constraints, encode_permutation, invalid_edge_terms, permutation_constraints_exact, sum_fragments,
    ConnectionVariant, DecodedPermutation, FormulationError, Fragment, PenaltyWeights, VariableLayout,
};
use crate::graph::Graph;
use crate::qubo::{Assignment, LinearExpr, QuboModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafObjective {
    Minimize,
    Maximize,
}

impl LeafObjective {
    pub fn sign(self) -> f64 {
        match self {
            LeafObjective::Minimize => 1.0,
            LeafObjective::Maximize => -1.0,
        }
    }
}

/// Shape of the leaf-counting tower for a graph on `n` vertices.
///
/// `sequence()[0] = n - 1` and `sequence()[d] = floor(log2(1 + sequence()[d-1]))`
/// until a value `<= 1` is reached (at least one step is always taken).
/// Level `l` (0-based) has `1 + sequence()[l + 1]` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafTower {
    seq: Vec<usize>,
}

impl LeafTower {
    pub fn new(n: usize) -> Result<Self, FormulationError> {
        if n < 2 {
            return Err(FormulationError::TooFewVertices { min: 2, n });
        }
        let mut seq = vec![n - 1];
        loop {
            let next = (1 + seq[seq.len() - 1]).ilog2() as usize;
            seq.push(next);
            if next <= 1 {
                break;
            }
        }
        Ok(LeafTower { seq })
    }

    pub fn sequence(&self) -> &[usize] {
        &self.seq
    }

    /// Number of levels.
    pub fn depth(&self) -> usize {
        self.seq.len() - 1
    }

    pub fn width(&self, level: usize) -> usize {
        1 + self.seq[level + 1]
    }

    pub fn widths(&self) -> Vec<usize> {
        (0..self.depth()).map(|l| self.width(l)).collect()
    }

    /// Slack bits per position, summed over levels.
    pub fn bits_per_position(&self) -> usize {
        self.widths().iter().sum()
    }

    pub fn coefficient(&self, level: usize, bit: usize) -> usize {
        let top = self.seq[level + 1];
        if bit < top {
            1 << bit
        } else {
            self.seq[level] + 1 - (1 << top)
        }
    }

    /// True when the remainder bit of `level` has coefficient zero. Such a
    /// bit would change the popcount without changing the value, so it is
    /// pinned to zero.
    pub fn remainder_pinned(&self, level: usize) -> bool {
        self.coefficient(level, self.width(level) - 1) == 0
    }

    pub fn value(&self, level: usize, bits: &[bool]) -> usize {
        bits.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| self.coefficient(level, j))
            .sum()
    }

    /// Every consistent tower (one bit vector per level) whose level 0
    /// encodes `children`.
    pub fn patterns_for(&self, children: usize) -> Vec<Vec<Vec<bool>>> {
        let mut out = Vec::new();
        self.extend_patterns(0, children, &mut Vec::new(), &mut out);
        out
    }

    fn extend_patterns(&self, level: usize, target: usize, acc: &mut Vec<Vec<bool>>, out: &mut Vec<Vec<Vec<bool>>>) {
        if level == self.depth() {
            out.push(acc.clone());
            return;
        }
        let w = self.width(level);
        for mask in 0..1u32 << w {
            let bits: Vec<bool> = (0..w).map(|j| (mask >> j) & 1 == 1).collect();
            if self.remainder_pinned(level) && bits[w - 1] {
                continue;
            }
            if self.value(level, &bits) != target {
                continue;
            }
            let ones = mask.count_ones() as usize;
            acc.push(bits);
            self.extend_patterns(level + 1, ones, acc, out);
            acc.pop();
        }
    }
}

#[derive(Debug, Clone)]
pub struct MlstSpec {
    graph: Graph,
    objective: LeafObjective,
    tower: LeafTower,
    weights: PenaltyWeights,
}

impl MlstSpec {
    pub fn new(graph: Graph, objective: LeafObjective) -> Result<Self, FormulationError> {
        let weights = PenaltyWeights::with_default_a(&graph, 1.0, false)?;
        Self::with_weights(graph, objective, weights)
    }

    /// Edge weights are ignored.
    pub fn with_weights(
        graph: Graph,
        objective: LeafObjective,
        weights: PenaltyWeights,
    ) -> Result<Self, FormulationError> {
        let tower = LeafTower::new(graph.n())?;
        if !graph.is_connected() {
            return Err(FormulationError::Disconnected);
        }
        if !graph.is_unit_weighted() {
            log::warn!("leaf spanning tree ignores edge weights");
        }
        Ok(MlstSpec {
            graph,
            objective,
            tower,
            weights,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn objective(&self) -> LeafObjective {
        self.objective
    }

    pub fn tower(&self) -> &LeafTower {
        &self.tower
    }

    pub fn weights(&self) -> PenaltyWeights {
        self.weights
    }

    pub fn layout(&self) -> VariableLayout {
        let n = self.graph.n();
        VariableLayout::new(n, n, self.tower.widths())
    }

    /// Level-0 value each slack position must hold; `None` for a root
    /// without children.
    pub fn child_targets(&self, perm: &DecodedPermutation) -> Vec<Option<usize>> {
        (0..self.graph.n() - 1)
            .map(|p| {
                let c = perm.children(p);
                if p == 0 {
                    c.checked_sub(1)
                } else {
                    Some(c)
                }
            })
            .collect()
    }

    pub fn slack_completions(&self, layout: &VariableLayout, perm: &DecodedPermutation) -> Vec<Assignment> {
        let mut out = vec![encode_permutation(layout, perm)];
        for (p, target) in self.child_targets(perm).into_iter().enumerate() {
            let towers = match target {
                Some(t) => self.tower.patterns_for(t),
                None => return Vec::new(),
            };
            out = out
                .into_iter()
                .flat_map(|a| {
                    towers.iter().map(move |tower| {
                        let mut a = a.clone();
                        for (level, bits) in tower.iter().enumerate() {
                            for (j, &b) in bits.iter().enumerate() {
                                a.set(layout.slack(level, p, j), b);
                            }
                        }
                        a
                    })
                })
                .collect();
        }
        out
    }

    pub fn slacks_consistent(&self, layout: &VariableLayout, perm: &DecodedPermutation, a: &Assignment) -> bool {
        let t = &self.tower;
        self.child_targets(perm).into_iter().enumerate().all(|(p, target)| {
            let Some(mut expected) = target else { return false };
            for level in 0..t.depth() {
                let bits = layout.slack_bits(a, level, p);
                if t.remainder_pinned(level) && bits[bits.len() - 1] {
                    return false;
                }
                if t.value(level, &bits) != expected {
                    return false;
                }
                expected = bits.iter().filter(|&&b| b).count();
            }
            true
        })
    }
}

pub fn mlst_variable_count(n: usize) -> usize {
    let l = LeafTower::new(n).map(|t| t.bits_per_position()).unwrap_or(0);
    2 * n * n - n + l * n - l
}

/// Leaf count as scored by the model: one for the last position plus one
/// for every position whose two top-level bits are clear.
pub fn leaf_count_from_tower(tower: &LeafTower, layout: &VariableLayout, a: &Assignment) -> usize {
    let top = tower.depth() - 1;
    1 + (0..layout.slack_positions())
        .filter(|&p| !a.get(layout.slack(top, p, 0)) && !a.get(layout.slack(top, p, 1)))
        .count()
}

pub fn mlst_fragments(spec: &MlstSpec) -> (Vec<Fragment>, VariableLayout) {
    let layout = spec.layout();
    let n = spec.graph.n();
    let w = spec.weights;
    let la = w.lambda_a();
    let tower = &spec.tower;
    let fresh = || QuboModel::new(layout.total());

    // (1 - a)(1 - b) = 1 - a - b + ab on the two top bits
    let mut leaves = fresh();
    let s = spec.objective.sign() * w.lambda_b();
    let top = tower.depth() - 1;
    leaves.add_offset(s * n as f64);
    for p in 0..n - 1 {
        let (b0, b1) = (layout.slack(top, p, 0), layout.slack(top, p, 1));
        leaves.add_linear(b0, -s);
        leaves.add_linear(b1, -s);
        leaves.add_quadratic(b0, b1, s);
    }

    let mut edges = fresh();
    invalid_edge_terms(&mut edges, &layout, &spec.graph, la, n - 1);
    let mut placement = fresh();
    permutation_constraints_exact(&mut placement, &layout, &w);
    let mut connection = fresh();
    connection_constraints(&mut connection, &layout, &w, ConnectionVariant::Full);

    let mut counters = fresh();
    for p in 0..n - 1 {
        let mut e = LinearExpr::new(if p == 0 { 1.0 } else { 0.0 });
        for j in 0..tower.width(0) {
            e.add(layout.slack(0, p, j), tower.coefficient(0, j) as f64);
        }
        for v in 0..n {
            e.add(layout.y(v, p), -1.0);
        }
        counters.add_penalty_square(&e, la);
        for level in 1..tower.depth() {
            let mut e = LinearExpr::new(0.0);
            for j in 0..tower.width(level) {
                e.add(layout.slack(level, p, j), tower.coefficient(level, j) as f64);
            }
            for j in 0..tower.width(level - 1) {
                e.add(layout.slack(level - 1, p, j), -1.0);
            }
            counters.add_penalty_square(&e, la);
        }
    }

    let mut pins = fresh();
    for level in (0..tower.depth()).filter(|&l| tower.remainder_pinned(l)) {
        for p in 0..n - 1 {
            pins.add_linear(layout.slack(level, p, tower.width(level) - 1), la);
        }
    }

    let fragments = vec![
        Fragment {
            name: "leaf_count",
            model: leaves,
        },
        Fragment {
            name: "invalid_edges",
            model: edges,
        },
        Fragment {
            name: "placement",
            model: placement,
        },
        Fragment {
            name: "connection",
            model: connection,
        },
        Fragment {
            name: "leaf_tower",
            model: counters,
        },
        Fragment {
            name: "remainder_pins",
            model: pins,
        },
    ];
    (fragments, layout)
}

pub fn build_mlst(spec: &MlstSpec) -> (QuboModel, VariableLayout) {
    let (fragments, layout) = mlst_fragments(spec);
    (sum_fragments(layout.total(), &fragments), layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{decode_permutation, tree_orderings};
    use crate::graph::parse_graph;

    fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1.0)))).unwrap()
    }

    fn star(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (0, v, 1.0))).unwrap()
    }

    #[test]
    fn tower_shapes() {
        let t3 = LeafTower::new(3).unwrap();
        assert_eq!(t3.sequence(), &[2, 1]);
        assert_eq!((t3.depth(), t3.bits_per_position()), (1, 2));
        let t8 = LeafTower::new(8).unwrap();
        assert_eq!(t8.sequence(), &[7, 3, 2, 1]);
        assert_eq!((t8.depth(), t8.bits_per_position()), (3, 9));
        let t2 = LeafTower::new(2).unwrap();
        assert_eq!(t2.sequence(), &[1, 1]);
        assert_eq!(t2.depth(), 1);
        assert!(LeafTower::new(1).is_err());
    }

    #[test]
    fn tower_depth_grows_like_iterated_log() {
        let mut worst = 0;
        for n in 2..=1_000_000 {
            let t = LeafTower::new(n).unwrap();
            assert_eq!(*t.sequence().last().unwrap(), 1);
            assert!(t.sequence()[..t.depth()].iter().skip(1).all(|&m| m > 1));
            worst = worst.max(t.depth());
        }
        assert!(worst <= 5, "depth {worst}");
    }

    #[test]
    fn tower_values_stay_in_range() {
        for n in 2..=64 {
            let t = LeafTower::new(n).unwrap();
            for level in 0..t.depth() {
                let w = t.width(level);
                let max = t.sequence()[level];
                for mask in 0..1u32 << w {
                    let bits: Vec<bool> = (0..w).map(|j| (mask >> j) & 1 == 1).collect();
                    assert!(t.value(level, &bits) <= max);
                }
                if !t.remainder_pinned(level) {
                    let zero_only = (0..1u32 << w)
                        .filter(|&mask| {
                            let bits: Vec<bool> = (0..w).map(|j| (mask >> j) & 1 == 1).collect();
                            t.value(level, &bits) == 0
                        })
                        .count();
                    assert_eq!(zero_only, 1);
                }
            }
            assert_eq!(t.width(t.depth() - 1), 2);
        }
    }

    #[test]
    fn variable_counts() {
        let (m, _) = build_mlst(&MlstSpec::new(complete(3), LeafObjective::Minimize).unwrap());
        assert_eq!(m.num_vars(), 19);
        for n in 2..=8 {
            let (m, l) = build_mlst(&MlstSpec::new(complete(n), LeafObjective::Maximize).unwrap());
            assert_eq!(m.num_vars(), mlst_variable_count(n));
            assert_eq!(l.total(), m.num_vars());
        }
    }

    #[test]
    fn rejects_bad_graphs() {
        let g = parse_graph("3 1\n1 2 1").unwrap();
        assert_eq!(
            MlstSpec::new(g, LeafObjective::Minimize).unwrap_err(),
            FormulationError::Disconnected
        );
        assert!(matches!(
            MlstSpec::new(complete(1), LeafObjective::Minimize),
            Err(FormulationError::TooFewVertices { .. })
        ));
    }

    #[test]
    fn leaf_count_examples() {
        let spec = MlstSpec::new(complete(3), LeafObjective::Minimize).unwrap();
        let l = spec.layout();
        assert_eq!(
            leaf_count_from_tower(spec.tower(), &l, &Assignment::zeros(l.total())),
            3
        );

        let path = DecodedPermutation {
            order: vec![0, 1, 2],
            parent: vec![None, Some(0), Some(1)],
        };
        // the middle vertex has one child, which level 0 can write two ways
        let fills = spec.slack_completions(&l, &path);
        assert_eq!(fills.len(), 2);
        for a in &fills {
            assert_eq!(leaf_count_from_tower(spec.tower(), &l, a), 2);
        }

        let spec = MlstSpec::new(star(4), LeafObjective::Minimize).unwrap();
        let l = spec.layout();
        let centre_first = DecodedPermutation {
            order: vec![0, 1, 2, 3],
            parent: vec![None, Some(0), Some(0), Some(0)],
        };
        for a in spec.slack_completions(&l, &centre_first) {
            assert_eq!(leaf_count_from_tower(spec.tower(), &l, &a), 3);
        }
    }

    /// With the remainder bit of level 0 left free at n = 4, a leaf can set
    /// it, raise the popcount, and read as internal on the top level. The
    /// pin fragment is what prices that at lambda_a.
    #[test]
    fn zero_coefficient_remainder_hides_leaves_without_pin() {
        let spec = MlstSpec::new(complete(4), LeafObjective::Minimize).unwrap();
        let t = spec.tower();
        assert_eq!(t.sequence(), &[3, 2, 1]);
        assert!(t.remainder_pinned(0));
        let (fragments, l) = mlst_fragments(&spec);
        let unpinned = sum_fragments(
            l.total(),
            &fragments
                .iter()
                .filter(|f| f.name != "remainder_pins")
                .cloned()
                .collect::<Vec<_>>(),
        );
        let pinned = build_mlst(&spec).0;

        // path 0-1-2-3 in order: positions 0 and 3 are leaves
        let path = DecodedPermutation {
            order: vec![0, 1, 2, 3],
            parent: vec![None, Some(0), Some(1), Some(2)],
        };
        let honest = spec.slack_completions(&l, &path);
        assert_eq!(honest.len(), 4);
        for a in &honest {
            assert_eq!(pinned.energy(a).unwrap(), 2.0);
        }

        // root leaf: level 0 = 0 with the remainder set, level 1 = 1
        let mut hidden = honest[0].clone();
        hidden.set(l.slack(0, 0, 2), true);
        hidden.set(l.slack(1, 0, 0), true);
        assert_eq!(unpinned.energy(&hidden).unwrap(), 1.0);
        assert_eq!(pinned.energy(&hidden).unwrap(), 1.0 + spec.weights().lambda_a());
        assert!(!spec.slacks_consistent(&l, &path, &hidden));
    }

    /// Position p reads as a leaf iff its vertex has degree one, over every
    /// consistent encoding of every spanning tree of K_n.
    #[test]
    fn leaf_test_matches_degree() {
        for n in 3..=5 {
            let g = complete(n);
            let spec = MlstSpec::new(g.clone(), LeafObjective::Minimize).unwrap();
            let l = spec.layout();
            let t = spec.tower();
            for tree in crate::oracle::spanning_trees(&g).unwrap() {
                let edges: Vec<(usize, usize)> = tree.iter().map(|&i| (g.edges()[i].u, g.edges()[i].v)).collect();
                let deg = |v: usize| edges.iter().filter(|&&(a, b)| a == v || b == v).count();
                let verts: Vec<usize> = (0..n).collect();
                for perm in tree_orderings(&verts, &edges) {
                    for a in spec.slack_completions(&l, &perm) {
                        assert_eq!(decode_permutation(&l, &a).unwrap(), perm);
                        for p in 0..n - 1 {
                            let top = t.depth() - 1;
                            let reads_leaf = !a.get(l.slack(top, p, 0)) && !a.get(l.slack(top, p, 1));
                            let zero_level0 = t.value(0, &l.slack_bits(&a, 0, p)) == 0;
                            assert_eq!(reads_leaf, zero_level0);
                            assert_eq!(reads_leaf, deg(perm.order[p]) == 1);
                        }
                    }
                }
            }
        }
    }
}
