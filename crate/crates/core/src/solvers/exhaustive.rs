use rayon::prelude::*;

use super::{CompiledQubo, Solution, SolveError};
use crate::qubo::{Assignment, QuboModel};

/// 2^26 states.
pub const MAX_EXHAUSTIVE_VARS: usize = 26;

fn check_size(m: &QuboModel) -> Result<(), SolveError> {
    if m.num_vars() > MAX_EXHAUSTIVE_VARS {
        return Err(SolveError::TooManyVariables {
            num_vars: m.num_vars(),
            cap: MAX_EXHAUSTIVE_VARS,
        });
    }
    Ok(())
}

/// Lexicographic order on masks read as bit vectors, variable 0 first.
fn mask_lex_less(a: u64, b: u64) -> bool {
    let d = a ^ b;
    d != 0 && (a >> d.trailing_zeros()) & 1 == 0
}

/// Walks the low `free` bits in Gray-code order with everything above fixed
/// to `base`, so each step costs one flip.
fn gray_walk(c: &CompiledQubo, n: usize, base: u64, free: usize, visit: &mut impl FnMut(u64, f64)) {
    let mut bits: Vec<bool> = (0..n).map(|i| (base >> i) & 1 == 1).collect();
    let mut fields = c.fields(&bits);
    let mut mask = base;
    let mut energy = c.energy(&bits);
    visit(mask, energy);
    for t in 1u64..1 << free {
        let i = t.trailing_zeros() as usize;
        energy += CompiledQubo::flip_delta(&bits, &fields, i);
        c.apply_flip(&mut bits, &mut fields, i);
        mask ^= 1 << i;
        visit(mask, energy);
    }
}

/// Calls `visit(mask, energy)` for every assignment, where bit `i` of
/// `mask` is variable `i`. Energies are tracked incrementally.
pub fn scan_exhaustive(m: &QuboModel, mut visit: impl FnMut(u64, f64)) -> Result<(), SolveError> {
    check_size(m)?;
    let c = CompiledQubo::new(m);
    gray_walk(&c, m.num_vars(), 0, m.num_vars(), &mut visit);
    Ok(())
}

/// Global minimizer; ties go to the lexicographically smallest bit vector.
pub fn solve_exhaustive(m: &QuboModel) -> Result<Solution, SolveError> {
    check_size(m)?;
    let n = m.num_vars();
    let c = CompiledQubo::new(m);
    let tol = c.tol;
    let fixed = n.min(4);
    let free = n - fixed;

    let pick = |best: Option<(f64, u64)>, cand: (f64, u64)| match best {
        None => Some(cand),
        Some(b) => {
            let wins = cand.0 < b.0 - tol || (cand.0 <= b.0 + tol && mask_lex_less(cand.1, b.1));
            Some(if wins { cand } else { b })
        }
    };

    let chunks: Vec<(f64, u64)> = (0u64..1 << fixed)
        .into_par_iter()
        .map(|high| {
            let mut best = None;
            gray_walk(&c, n, high << free, free, &mut |mask, e| best = pick(best, (e, mask)));
            best.expect("every chunk visits at least one state")
        })
        .collect();
    let (_, mask) = chunks.into_iter().fold(None, pick).expect("at least one chunk");

    let assignment = Assignment::from_mask(mask, n);
    let energy = m.energy(&assignment).expect("length matches");
    Ok(Solution { assignment, energy })
}
