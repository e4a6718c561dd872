//! k-minimum spanning tree: the cheapest tree with exactly `k` vertices.
//!
//! Only `k` positions exist, so the model needs `2nk - n` variables.

use crate::encoding::{
    connection_constraints, edge_cost_terms, permutation_constraints_kcard, sum_fragments, ConnectionVariant,
    FormulationError, Fragment, PenaltyWeights, VariableLayout,
};
use crate::graph::Graph;
use crate::qubo::QuboModel;

#[derive(Debug, Clone)]
pub struct KmstSpec {
    graph: Graph,
    k: usize,
    weights: PenaltyWeights,
}

impl KmstSpec {
    /// Uses `lambda_b = 1` and the default constraint penalty.
    pub fn new(graph: Graph, k: usize) -> Result<Self, FormulationError> {
        let weights = PenaltyWeights::with_default_a(&graph, 1.0, true)?;
        Self::with_weights(graph, k, weights)
    }

    /// Disconnected graphs are accepted; infeasibility shows up when the
    /// solution is decoded.
    pub fn with_weights(graph: Graph, k: usize, weights: PenaltyWeights) -> Result<Self, FormulationError> {
        if k == 0 || k > graph.n() {
            return Err(FormulationError::KOutOfRange { k, n: graph.n() });
        }
        Ok(KmstSpec { graph, k, weights })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weights(&self) -> PenaltyWeights {
        self.weights
    }

    pub fn layout(&self) -> VariableLayout {
        VariableLayout::new(self.graph.n(), self.k, Vec::new())
    }
}

pub fn kmst_variable_count(n: usize, k: usize) -> usize {
    2 * n * k - n
}

pub fn kmst_fragments(spec: &KmstSpec) -> (Vec<Fragment>, VariableLayout) {
    let layout = spec.layout();
    let w = spec.weights;
    let fresh = || QuboModel::new(layout.total());

    let mut tree = fresh();
    edge_cost_terms(&mut tree, &layout, &spec.graph, &w, spec.k - 1);
    let mut placement = fresh();
    permutation_constraints_kcard(&mut placement, &layout, &w);
    let mut connection = fresh();
    connection_constraints(&mut connection, &layout, &w, ConnectionVariant::KCardinality);

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
    ];
    (fragments, layout)
}

pub fn build_kmst(spec: &KmstSpec) -> (QuboModel, VariableLayout) {
    let (fragments, layout) = kmst_fragments(spec);
    (sum_fragments(layout.total(), &fragments), layout)
}
