use crate::dcmst::{dcmst_fragments, dcmst_variable_count, DcmstSpec};
use crate::encoding::{sum_fragments, DecodedPermutation, Fragment, PenaltyWeights, VariableLayout};
use crate::graph::Graph;
use crate::kmst::{kmst_fragments, kmst_variable_count, KmstSpec};
use crate::mlst::{mlst_fragments, mlst_variable_count, LeafObjective, MlstSpec};
use crate::qubo::{Assignment, QuboModel};

/// Any of the supported spanning tree problems.
#[derive(Debug, Clone)]
pub enum Problem {
    Kmst(KmstSpec),
    Dcmst(DcmstSpec),
    Leaves(MlstSpec),
}

impl From<KmstSpec> for Problem {
    fn from(s: KmstSpec) -> Self {
        Problem::Kmst(s)
    }
}

impl From<DcmstSpec> for Problem {
    fn from(s: DcmstSpec) -> Self {
        Problem::Dcmst(s)
    }
}

impl From<MlstSpec> for Problem {
    fn from(s: MlstSpec) -> Self {
        Problem::Leaves(s)
    }
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Kmst(_) => "kmst",
            Problem::Dcmst(_) => "dcmst",
            Problem::Leaves(s) => match s.objective() {
                LeafObjective::Minimize => "minleaf",
                LeafObjective::Maximize => "maxleaf",
            },
        }
    }

    pub fn graph(&self) -> &Graph {
        match self {
            Problem::Kmst(s) => s.graph(),
            Problem::Dcmst(s) => s.graph(),
            Problem::Leaves(s) => s.graph(),
        }
    }

    pub fn weights(&self) -> PenaltyWeights {
        match self {
            Problem::Kmst(s) => s.weights(),
            Problem::Dcmst(s) => s.weights(),
            Problem::Leaves(s) => s.weights(),
        }
    }

    /// `-1` for leaf maximization, `+1` otherwise: a valid encoding has
    /// energy `sign * lambda_b * objective`.
    pub fn energy_sign(&self) -> f64 {
        match self {
            Problem::Leaves(s) => s.objective().sign(),
            _ => 1.0,
        }
    }

    pub fn layout(&self) -> VariableLayout {
        match self {
            Problem::Kmst(s) => s.layout(),
            Problem::Dcmst(s) => s.layout(),
            Problem::Leaves(s) => s.layout(),
        }
    }

    pub fn fragments(&self) -> (Vec<Fragment>, VariableLayout) {
        match self {
            Problem::Kmst(s) => kmst_fragments(s),
            Problem::Dcmst(s) => dcmst_fragments(s),
            Problem::Leaves(s) => mlst_fragments(s),
        }
    }

    pub fn build(&self) -> (QuboModel, VariableLayout) {
        let (fragments, layout) = self.fragments();
        (sum_fragments(layout.total(), &fragments), layout)
    }

    /// Closed-form variable count for this problem size.
    pub fn formula_variable_count(&self) -> usize {
        let n = self.graph().n();
        match self {
            Problem::Kmst(s) => kmst_variable_count(n, s.k()),
            Problem::Dcmst(s) => dcmst_variable_count(n, s.delta()),
            Problem::Leaves(_) => mlst_variable_count(n),
        }
    }

    /// All assignments encoding `perm` with every slack counter consistent.
    /// Empty when no consistent filling exists.
    pub fn consistent_encodings(&self, layout: &VariableLayout, perm: &DecodedPermutation) -> Vec<Assignment> {
        match self {
            Problem::Kmst(_) => vec![crate::encoding::encode_permutation(layout, perm)],
            Problem::Dcmst(s) => s.slack_completions(layout, perm),
            Problem::Leaves(s) => s.slack_completions(layout, perm),
        }
    }

    pub fn slacks_consistent(&self, layout: &VariableLayout, perm: &DecodedPermutation, a: &Assignment) -> bool {
        match self {
            Problem::Kmst(_) => true,
            Problem::Dcmst(s) => s.slacks_consistent(layout, perm, a),
            Problem::Leaves(s) => s.slacks_consistent(layout, perm, a),
        }
    }
}
