//! Degree-constrained minimum spanning tree.
//!
//! Each position except the last carries a binary degree counter with
//! `floor(log2 delta) + 1` bits whose value range is exactly `0..=delta`.

use crate::encoding::{
    connection_constraints, edge_cost_terms, permutation_constraints_exact, sum_fragments, ConnectionVariant,
    DecodedPermutation, FormulationError, Fragment, PenaltyWeights, VariableLayout,
};
use crate::graph::Graph;
use crate::qubo::{Assignment, LinearExpr, QuboModel};

/// Bounded binary counter: plain bits `2^j` for `j < top`, plus a remainder
/// bit worth `delta + 1 - 2^top` where `top = floor(log2 delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeSlack {
    delta: usize,
    top: usize,
}

impl DegreeSlack {
    pub fn new(delta: usize) -> Result<Self, FormulationError> {
        if delta == 0 {
            return Err(FormulationError::InvalidDelta);
        }
        Ok(DegreeSlack {
            delta,
            top: delta.ilog2() as usize,
        })
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Index of the remainder bit, `floor(log2 delta)`.
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn width(&self) -> usize {
        self.top + 1
    }

    pub fn coefficient(&self, bit: usize) -> usize {
        if bit < self.top {
            1 << bit
        } else {
            self.delta + 1 - (1 << self.top)
        }
    }

    pub fn value(&self, bits: &[bool]) -> usize {
        bits.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| self.coefficient(j))
            .sum()
    }

    /// All bit patterns encoding `value`.
    pub fn patterns_for(&self, value: usize) -> Vec<Vec<bool>> {
        let w = self.width();
        (0..1u32 << w)
            .map(|mask| (0..w).map(|j| (mask >> j) & 1 == 1).collect::<Vec<_>>())
            .filter(|bits| self.value(bits) == value)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct DcmstSpec {
    graph: Graph,
    slack: DegreeSlack,
    weights: PenaltyWeights,
}

impl DcmstSpec {
    pub fn new(graph: Graph, delta: usize) -> Result<Self, FormulationError> {
        let weights = PenaltyWeights::with_default_a(&graph, 1.0, true)?;
        Self::with_weights(graph, delta, weights)
    }

    pub fn with_weights(graph: Graph, delta: usize, weights: PenaltyWeights) -> Result<Self, FormulationError> {
        let slack = DegreeSlack::new(delta)?;
        if !graph.is_connected() {
            return Err(FormulationError::Disconnected);
        }
        Ok(DcmstSpec { graph, slack, weights })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn delta(&self) -> usize {
        self.slack.delta
    }

    pub fn slack(&self) -> DegreeSlack {
        self.slack
    }

    pub fn weights(&self) -> PenaltyWeights {
        self.weights
    }

    pub fn layout(&self) -> VariableLayout {
        let n = self.graph.n();
        let widths = if n > 1 { vec![self.slack.width()] } else { Vec::new() };
        VariableLayout::new(n, n, widths)
    }

    /// Counter value each position must hold for `perm`: the root's degree
    /// is its child count, later positions add their implicit parent edge.
    pub fn degree_targets(&self, perm: &DecodedPermutation) -> Vec<usize> {
        let n = self.graph.n();
        (0..n.saturating_sub(1))
            .map(|p| perm.children(p) + usize::from(p > 0))
            .collect()
    }

    /// Every slack filling of `perm` that zeroes the degree penalty. Empty
    /// when some vertex exceeds the bound.
    pub fn slack_completions(&self, layout: &VariableLayout, perm: &DecodedPermutation) -> Vec<Assignment> {
        let base = crate::encoding::encode_permutation(layout, perm);
        let mut out = vec![base];
        for (p, target) in self.degree_targets(perm).into_iter().enumerate() {
            let patterns = self.slack.patterns_for(target);
            out = out
                .into_iter()
                .flat_map(|a| {
                    patterns.iter().map(move |bits| {
                        let mut a = a.clone();
                        for (j, &b) in bits.iter().enumerate() {
                            a.set(layout.slack(0, p, j), b);
                        }
                        a
                    })
                })
                .collect();
        }
        out
    }

    pub fn slacks_consistent(&self, layout: &VariableLayout, perm: &DecodedPermutation, a: &Assignment) -> bool {
        self.degree_targets(perm)
            .into_iter()
            .enumerate()
            .all(|(p, t)| self.slack.value(&layout.slack_bits(a, 0, p)) == t)
    }
}

pub fn dcmst_variable_count(n: usize, delta: usize) -> usize {
    let m = delta.ilog2() as usize;
    2 * n * n + n * m - (m + 1)
}

pub fn dcmst_fragments(spec: &DcmstSpec) -> (Vec<Fragment>, VariableLayout) {
    let layout = spec.layout();
    let n = spec.graph.n();
    let w = spec.weights;
    let fresh = || QuboModel::new(layout.total());

    let mut tree = fresh();
    edge_cost_terms(&mut tree, &layout, &spec.graph, &w, n - 1);
    let mut placement = fresh();
    permutation_constraints_exact(&mut placement, &layout, &w);
    let mut connection = fresh();
    connection_constraints(&mut connection, &layout, &w, ConnectionVariant::Full);

    let mut degree = fresh();
    for p in 0..n.saturating_sub(1) {
        let mut e = LinearExpr::new(if p == 0 { 0.0 } else { -1.0 });
        for j in 0..spec.slack.width() {
            e.add(layout.slack(0, p, j), spec.slack.coefficient(j) as f64);
        }
        for v in 0..n {
            e.add(layout.y(v, p), -1.0);
        }
        degree.add_penalty_square(&e, w.lambda_a());
    }

    let fragments = vec![
        Fragment {
            name: "tree_cost",
            model: tree,
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
            name: "degree",
            model: degree,
        },
    ];
    (fragments, layout)
}

pub fn build_dcmst(spec: &DcmstSpec) -> (QuboModel, VariableLayout) {
    let (fragments, layout) = dcmst_fragments(spec);
    (sum_fragments(layout.total(), &fragments), layout)
}
