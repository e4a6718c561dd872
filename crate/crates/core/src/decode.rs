//! Turning assignments back into trees and checking them without trusting
//! the model energy.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::encoding::{decode_permutation, VariableLayout};
use crate::problem::Problem;
use crate::qubo::{Assignment, QuboModel};

#[derive(Debug, Error, PartialEq)]
#[error("assignment has {got} bits, layout has {expected}")]
pub struct DecodeError {
    pub expected: usize,
    pub got: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeSolution {
    /// Vertices in insertion order.
    pub vertices: Vec<usize>,
    /// `(child, parent)` pairs.
    pub parent_edges: Vec<(usize, usize)>,
    /// Tree weight, or leaf count for the leaf problems. `None` when the
    /// bits do not describe a tree of graph edges.
    pub objective: Option<f64>,
    pub valid: bool,
    /// False when the tree is fine but a slack counter disagrees with it.
    pub slacks_consistent: bool,
    pub violations: Vec<String>,
}

impl TreeSolution {
    fn invalid(reason: String) -> Self {
        TreeSolution {
            vertices: Vec::new(),
            parent_edges: Vec::new(),
            objective: None,
            valid: false,
            slacks_consistent: false,
            violations: vec![reason],
        }
    }

    /// Undirected edges as `(min, max)` pairs.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.parent_edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
    }
}

/// One line `u v` per edge (1-based, ascending), then `objective` and
/// `valid` lines.
impl fmt::Display for TreeSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, v) in self.edge_set() {
            writeln!(f, "{} {}", u + 1, v + 1)?;
        }
        match self.objective {
            Some(o) => writeln!(f, "objective {o}")?,
            None => writeln!(f, "objective none")?,
        }
        writeln!(f, "valid {}", self.valid)
    }
}

pub fn decode(problem: &Problem, layout: &VariableLayout, a: &Assignment) -> Result<TreeSolution, DecodeError> {
    if a.len() != layout.total() {
        return Err(DecodeError {
            expected: layout.total(),
            got: a.len(),
        });
    }
    let perm = match decode_permutation(layout, a) {
        Ok(p) => p,
        Err(reason) => return Ok(TreeSolution::invalid(reason.0)),
    };
    let g = problem.graph();
    let edges = perm.edges();
    let mut violations = Vec::new();

    let mut weight = Some(0.0);
    for &(c, p) in &edges {
        match g.weight(c, p) {
            Some(w) => weight = weight.map(|t| t + w),
            None => {
                violations.push(format!("edge ({}, {}) not in graph", c.min(p) + 1, c.max(p) + 1));
                weight = None;
            }
        }
    }

    let mut degree = vec![0usize; g.n()];
    for &(c, p) in &edges {
        degree[c] += 1;
        degree[p] += 1;
    }

    let objective = match problem {
        Problem::Kmst(s) => {
            if perm.order.len() != s.k() {
                violations.push(format!("tree has {} vertices, expected {}", perm.order.len(), s.k()));
            }
            weight
        }
        Problem::Dcmst(s) => {
            for (v, &d) in degree.iter().enumerate() {
                if d > s.delta() {
                    violations.push(format!("vertex {} has degree {d} > {}", v + 1, s.delta()));
                }
            }
            weight
        }
        Problem::Leaves(_) => {
            if perm.order.len() != g.n() {
                violations.push("tree does not span the graph".to_string());
            }
            Some(degree.iter().filter(|&&d| d == 1).count() as f64)
        }
    };

    let slacks_consistent = problem.slacks_consistent(layout, &perm, a);
    if violations.is_empty() && !slacks_consistent {
        violations.push("valid tree, inconsistent slacks".to_string());
    }
    Ok(TreeSolution {
        valid: violations.iter().all(|v| v.starts_with("valid tree")),
        vertices: perm.order,
        parent_edges: edges,
        objective,
        slacks_consistent,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub energy: f64,
    /// `sign * lambda_b * objective`, when the assignment decodes to a
    /// consistent valid tree.
    pub expected: Option<f64>,
    pub holds: bool,
    /// Per-fragment energies, filled only when the identity fails.
    pub breakdown: Vec<(&'static str, f64)>,
}

/// Checks that a valid, slack-consistent encoding has energy exactly
/// `lambda_b * objective` (negated for leaf maximization), to `1e-6`
/// relative.
pub fn check_energy_identity(
    problem: &Problem,
    model: &QuboModel,
    layout: &VariableLayout,
    a: &Assignment,
) -> Result<EnergyReport, DecodeError> {
    let sol = decode(problem, layout, a)?;
    let energy = model.energy(a).map_err(|_| DecodeError {
        expected: model.num_vars(),
        got: a.len(),
    })?;
    let expected = match (sol.valid && sol.slacks_consistent, sol.objective) {
        (true, Some(obj)) => Some(problem.energy_sign() * problem.weights().lambda_b() * obj),
        _ => None,
    };
    let holds = expected.is_some_and(|x| (energy - x).abs() <= 1e-6 * energy.abs().max(1.0));
    let breakdown = if holds {
        Vec::new()
    } else {
        problem
            .fragments()
            .0
            .iter()
            .map(|f| (f.name, f.model.energy(a).unwrap_or(f64::NAN)))
            .collect()
    };
    Ok(EnergyReport {
        energy,
        expected,
        holds,
        breakdown,
    })
}
