//! QUBO formulations of constrained spanning tree problems.
//!
//! A tree is encoded as an insertion order of vertices plus, for each
//! vertex, the earlier position it attaches to. Penalty terms force the
//! bits to describe such an order; the objective is added on top. Minimum
//! spanning trees with a vertex count (`kmst`), with a degree bound
//! (`dcmst`), and with the fewest or most leaves (`mlst`) are supported.
//!
//! ```
//! use spantree_qubo::{parse_graph, solve_exhaustive, decode, KmstSpec, Problem};
//!
//! let g = parse_graph("3 3\n1 2 1\n1 3 2\n2 3 3").unwrap();
//! let problem: Problem = KmstSpec::new(g, 2).unwrap().into();
//! let (model, layout) = problem.build();
//! let best = solve_exhaustive(&model).unwrap();
//! let tree = decode(&problem, &layout, &best.assignment).unwrap();
//! assert_eq!(tree.objective, Some(1.0));
//! ```

pub mod dcmst;
pub mod decode;
pub mod encoding;
pub mod graph;
pub mod kmst;
pub mod mlst;
pub mod oracle;
pub mod problem;
pub mod qubo;
pub mod solvers;

pub use dcmst::{dcmst_variable_count, DcmstSpec};
pub use decode::{check_energy_identity, decode, DecodeError, EnergyReport, TreeSolution};
pub use encoding::{FormulationError, PenaltyWeights, VariableLayout};
pub use graph::{parse_graph, Graph, GraphError};
pub use kmst::{kmst_variable_count, KmstSpec};
pub use mlst::{mlst_variable_count, LeafObjective, MlstSpec};
pub use problem::Problem;
pub use qubo::{export_qubo, import_qubo, Assignment, IsingModel, QuboError, QuboModel};
pub use solvers::{
    scan_exhaustive, solve_anneal, solve_exhaustive, solve_structured, AnnealSchedule, Solution, SolveError,
};
