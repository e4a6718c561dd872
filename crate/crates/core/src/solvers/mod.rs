//! Ground-state search: exhaustive, simulated annealing, and enumeration of
//! feasible encodings only.

mod anneal;
mod exhaustive;
mod structured;

pub use anneal::{solve_anneal, AnnealSchedule};
pub use exhaustive::{scan_exhaustive, solve_exhaustive, MAX_EXHAUSTIVE_VARS};
pub use structured::{solve_structured, MAX_STRUCTURED_VERTICES};

use thiserror::Error;

use crate::qubo::{Assignment, QuboModel};

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("model has {num_vars} variables, exhaustive search is capped at {cap}")]
    TooManyVariables { num_vars: usize, cap: usize },
    #[error("graph has {n} vertices, structured enumeration is capped at {cap}")]
    TooManyVertices { n: usize, cap: usize },
    #[error("invalid schedule: {0}")]
    Schedule(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub assignment: Assignment,
    pub energy: f64,
}

/// Adjacency form of a model for fast single-flip updates.
///
/// `field[i] = a_i + sum_j b_ij x_j` is the energy change of raising `x_i`
/// from 0 to 1.
pub(crate) struct CompiledQubo {
    pub offset: f64,
    pub linear: Vec<f64>,
    /// Neighbors of `i` are `adjacency[start[i]..start[i + 1]]`.
    start: Vec<usize>,
    adjacency: Vec<(usize, f64)>,
    /// Tie tolerance for energy comparisons.
    pub tol: f64,
}

impl CompiledQubo {
    pub fn new(m: &QuboModel) -> Self {
        let n = m.num_vars();
        let mut linear = vec![0.0; n];
        for (&i, &a) in m.linear() {
            linear[i] = a;
        }
        let mut neighbors = vec![Vec::new(); n];
        for (&(i, j), &b) in m.quadratic() {
            neighbors[i].push((j, b));
            neighbors[j].push((i, b));
        }
        let mut start = vec![0];
        for list in &neighbors {
            start.push(start[start.len() - 1] + list.len());
        }
        CompiledQubo {
            offset: m.offset(),
            linear,
            start,
            adjacency: neighbors.concat(),
            tol: 1e-9 * (1.0 + m.coefficient_scale()),
        }
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[self.start[i]..self.start[i + 1]]
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        let mut e = self.offset;
        for i in (0..bits.len()).filter(|&i| bits[i]) {
            e += self.linear[i];
            for &(j, b) in self.neighbors(i) {
                if j > i && bits[j] {
                    e += b;
                }
            }
        }
        e
    }

    pub fn fields(&self, bits: &[bool]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                self.linear[i]
                    + self
                        .neighbors(i)
                        .iter()
                        .filter(|(j, _)| bits[*j])
                        .map(|(_, b)| b)
                        .sum::<f64>()
            })
            .collect()
    }

    #[inline]
    pub fn flip_delta(bits: &[bool], fields: &[f64], i: usize) -> f64 {
        if bits[i] {
            -fields[i]
        } else {
            fields[i]
        }
    }

    #[inline]
    pub fn apply_flip(&self, bits: &mut [bool], fields: &mut [f64], i: usize) {
        bits[i] = !bits[i];
        let s = if bits[i] { 1.0 } else { -1.0 };
        for &(j, b) in self.neighbors(i) {
            fields[j] += s * b;
        }
    }
}

/// `a` orders before `b`: lower energy, or a tie broken by the
/// lexicographically smaller bit vector (variable 0 first).
pub(crate) fn better(a: (f64, &[bool]), b: (f64, &[bool]), tol: f64) -> bool {
    if a.0 < b.0 - tol {
        return true;
    }
    if a.0 > b.0 + tol {
        return false;
    }
    a.1 < b.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_model(rng: &mut ChaCha8Rng, n: usize) -> QuboModel {
        let mut m = QuboModel::new(n);
        m.add_offset(rng.gen_range(-1.0..1.0));
        for i in 0..n {
            m.add_term(i, None, rng.gen_range(-2.0..2.0)).unwrap();
            for j in i + 1..n {
                if rng.gen_bool(0.4) {
                    m.add_term(i, Some(j), rng.gen_range(-2.0..2.0)).unwrap();
                }
            }
        }
        m
    }

    #[test]
    fn incremental_deltas_match_full_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let m = random_model(&mut rng, 20);
            let c = CompiledQubo::new(&m);
            let mut bits: Vec<bool> = (0..20).map(|_| rng.gen()).collect();
            let mut fields = c.fields(&bits);
            for _ in 0..1000 {
                let i = rng.gen_range(0..20);
                let before = m.energy(&Assignment::from(bits.clone())).unwrap();
                let delta = CompiledQubo::flip_delta(&bits, &fields, i);
                c.apply_flip(&mut bits, &mut fields, i);
                let after = m.energy(&Assignment::from(bits.clone())).unwrap();
                assert!((delta - (after - before)).abs() <= 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn compiled_energy_matches_model(seed in any::<u64>(), mask in any::<u16>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_model(&mut rng, 12);
            let a = Assignment::from_mask(mask as u64, 12);
            let c = CompiledQubo::new(&m);
            prop_assert!((c.energy(a.bits()) - m.energy(&a).unwrap()).abs() <= 1e-9);
        }
    }
}
