use super::{better, CompiledQubo, Solution, SolveError};
use crate::encoding::{DecodedPermutation, VariableLayout};
use crate::problem::Problem;
use crate::qubo::QuboModel;

pub const MAX_STRUCTURED_VERTICES: usize = 7;

struct Search<'a> {
    problem: &'a Problem,
    layout: &'a VariableLayout,
    compiled: CompiledQubo,
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    used: Vec<bool>,
    best: Option<(f64, Vec<bool>)>,
}

impl Search<'_> {
    fn extend(&mut self) {
        let p = self.order.len();
        if p == self.layout.positions() {
            self.evaluate();
            return;
        }
        let g = self.problem.graph();
        for v in 0..g.n() {
            if self.used[v] {
                continue;
            }
            self.used[v] = true;
            self.order.push(v);
            if p == 0 {
                self.parent.push(None);
                self.extend();
                self.parent.pop();
            } else {
                for q in 0..p {
                    if g.has_edge(self.order[q], v) {
                        self.parent.push(Some(q));
                        self.extend();
                        self.parent.pop();
                    }
                }
            }
            self.order.pop();
            self.used[v] = false;
        }
    }

    fn evaluate(&mut self) {
        let perm = DecodedPermutation {
            order: self.order.clone(),
            parent: self.parent.clone(),
        };
        for a in self.problem.consistent_encodings(self.layout, &perm) {
            let e = self.compiled.energy(a.bits());
            let wins = match &self.best {
                None => true,
                Some((be, bb)) => better((e, a.bits()), (*be, bb), self.compiled.tol),
            };
            if wins {
                self.best = Some((e, a.bits().to_vec()));
            }
        }
    }
}

/// Minimum energy over encodings of trees built from graph edges with
/// consistent slacks, skipping everything the penalties are meant to rule
/// out. `None` when the problem has no feasible tree.
pub fn solve_structured(
    problem: &Problem,
    layout: &VariableLayout,
    model: &QuboModel,
) -> Result<Option<Solution>, SolveError> {
    let n = problem.graph().n();
    if n > MAX_STRUCTURED_VERTICES {
        return Err(SolveError::TooManyVertices {
            n,
            cap: MAX_STRUCTURED_VERTICES,
        });
    }
    let mut search = Search {
        problem,
        layout,
        compiled: CompiledQubo::new(model),
        order: Vec::new(),
        parent: Vec::new(),
        used: vec![false; n],
        best: None,
    };
    search.extend();
    Ok(search.best.map(|(_, bits)| {
        let assignment = bits.into();
        let energy = model.energy(&assignment).expect("length matches");
        Solution { assignment, energy }
    }))
}
