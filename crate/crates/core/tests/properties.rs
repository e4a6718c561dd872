use proptest::prelude::*;

use spantree_qubo::encoding::{decode_permutation, tree_orderings};
use spantree_qubo::oracle::{oracle_dcmst, oracle_leaves, oracle_mst, spanning_trees};
use spantree_qubo::{
    decode, export_qubo, import_qubo, solve_exhaustive, solve_structured, Assignment, DcmstSpec, Graph, KmstSpec,
    LeafObjective, MlstSpec, Problem,
};

fn graph_from(n: usize, mask: u32, weights: &[u8]) -> Graph {
    let edges: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(i, (u, v))| (u, v, weights[i % weights.len()] as f64))
        .collect();
    Graph::new(n, edges).unwrap()
}

fn connected_graph(n: usize) -> impl Strategy<Value = Graph> {
    let pairs = n * (n - 1) / 2;
    (any::<u32>(), prop::collection::vec(1u8..=4, pairs))
        .prop_map(move |(mask, w)| graph_from(n, mask | 1, &w))
        .prop_filter("connected", |g| g.is_connected())
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    Graph::new(g.n(), g.edges().iter().map(|e| (perm[e.u], perm[e.v], e.weight))).unwrap()
}

fn best(problem: Problem) -> Option<f64> {
    let (m, l) = problem.build();
    solve_structured(&problem, &l, &m).unwrap().map(|s| s.energy)
}

#[test]
fn encodings_decode_to_themselves() {
    let g = graph_from(4, 0b111111, &[1, 2, 3]);
    let problems: Vec<Problem> = vec![
        KmstSpec::new(g.clone(), 4).unwrap().into(),
        DcmstSpec::new(g.clone(), 2).unwrap().into(),
        MlstSpec::new(g.clone(), LeafObjective::Maximize).unwrap().into(),
    ];
    let verts: Vec<usize> = (0..4).collect();
    for problem in problems {
        let layout = problem.layout();
        for tree in spanning_trees(&g).unwrap() {
            let edges: Vec<(usize, usize)> = tree.iter().map(|&i| (g.edges()[i].u, g.edges()[i].v)).collect();
            for perm in tree_orderings(&verts, &edges) {
                for a in problem.consistent_encodings(&layout, &perm) {
                    assert_eq!(decode_permutation(&layout, &a).unwrap(), perm);
                    let sol = decode(&problem, &layout, &a).unwrap();
                    assert!(sol.slacks_consistent);
                    assert_eq!(
                        sol.edge_set(),
                        edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect()
                    );
                }
            }
        }
    }
}

#[test]
fn exported_model_keeps_energies() {
    let g = graph_from(3, 0b111, &[1, 2, 3]);
    let problem: Problem = MlstSpec::new(g, LeafObjective::Minimize).unwrap().into();
    let (m, _) = problem.build();
    let back = import_qubo(&export_qubo(&m)).unwrap();
    for mask in (0..1u64 << m.num_vars()).step_by(97) {
        let a = Assignment::from_mask(mask, m.num_vars());
        assert_eq!(m.energy(&a).unwrap(), back.energy(&a).unwrap());
    }
}

#[test]
fn kmst_ground_energy_scales_with_weights() {
    let g = graph_from(3, 0b111, &[1, 3, 2]);
    for k in 1..=3 {
        let base = solve_exhaustive(&Problem::from(KmstSpec::new(g.clone(), k).unwrap()).build().0).unwrap();
        let scaled = Problem::from(KmstSpec::new(g.scaled(3.0).unwrap(), k).unwrap());
        let s = solve_exhaustive(&scaled.build().0).unwrap();
        assert_eq!(s.energy, 3.0 * base.energy);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn loose_degree_bound_gives_mst(g in connected_graph(4)) {
        let energy = best(DcmstSpec::new(g.clone(), 3).unwrap().into());
        prop_assert_eq!(energy, Some(oracle_mst(&g).unwrap()));
    }

    #[test]
    fn degree_bound_matches_oracle(g in connected_graph(4), delta in 1usize..=3) {
        let energy = best(DcmstSpec::new(g.clone(), delta).unwrap().into());
        prop_assert_eq!(energy, oracle_dcmst(&g, delta).unwrap());
    }

    #[test]
    fn leaf_optima_bracket(g in connected_graph(5)) {
        let min = best(MlstSpec::new(g.clone(), LeafObjective::Minimize).unwrap().into()).unwrap();
        let max = -best(MlstSpec::new(g.clone(), LeafObjective::Maximize).unwrap().into()).unwrap();
        prop_assert!(2.0 <= min && min <= max && max <= 4.0);
        prop_assert_eq!(min, oracle_leaves(&g, LeafObjective::Minimize).unwrap() as f64);
        prop_assert_eq!(max, oracle_leaves(&g, LeafObjective::Maximize).unwrap() as f64);
    }

    #[test]
    fn relabeling_vertices_keeps_optimum(g in connected_graph(4), perm in Just((0..4).collect::<Vec<usize>>()).prop_shuffle()) {
        let h = relabel(&g, &perm);
        prop_assert_eq!(
            best(DcmstSpec::new(g.clone(), 2).unwrap().into()),
            best(DcmstSpec::new(h.clone(), 2).unwrap().into())
        );
        prop_assert_eq!(
            best(MlstSpec::new(g, LeafObjective::Maximize).unwrap().into()),
            best(MlstSpec::new(h, LeafObjective::Maximize).unwrap().into())
        );
    }
}
