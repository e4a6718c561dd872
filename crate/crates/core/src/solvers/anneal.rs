use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{better, CompiledQubo, Solution, SolveError};
use crate::qubo::{Assignment, QuboModel};

/// Metropolis single-flip annealing with a geometric inverse-temperature
/// ramp. Restart `r` draws from stream `r` of a generator keyed by `seed`,
/// so different seeds share no restarts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub beta_initial: f64,
    pub beta_final: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            sweeps: 1000,
            beta_initial: 0.1,
            beta_final: 10.0,
            restarts: 100,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn with_seed(self, seed: u64) -> Self {
        AnnealSchedule { seed, ..self }
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(SolveError::Schedule("sweeps and restarts must be at least 1".into()));
        }
        if !(self.beta_initial > 0.0 && self.beta_final >= self.beta_initial && self.beta_final.is_finite()) {
            return Err(SolveError::Schedule(format!(
                "need 0 < beta_initial <= beta_final, got {} and {}",
                self.beta_initial, self.beta_final
            )));
        }
        Ok(())
    }

    pub fn betas(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_final];
        }
        let ratio = self.beta_final / self.beta_initial;
        (0..self.sweeps)
            .map(|t| self.beta_initial * ratio.powf(t as f64 / (self.sweeps - 1) as f64))
            .collect()
    }
}

/// Flips the single most improving bit until none improves.
fn steepest_descent(c: &CompiledQubo, bits: &mut [bool], fields: &mut [f64]) {
    loop {
        let (i, delta) = (0..bits.len())
            .map(|i| (i, CompiledQubo::flip_delta(bits, fields, i)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, 0.0));
        if delta >= -c.tol {
            return;
        }
        c.apply_flip(bits, fields, i);
    }
}

fn run_restart(c: &CompiledQubo, betas: &[f64], seed: u64, stream: u64) -> (f64, Vec<bool>) {
    let n = c.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut fields = c.fields(&bits);
    let mut energy = c.energy(&bits);
    let mut best_energy = energy;
    let mut best = bits.clone();

    for &beta in betas {
        for i in 0..n {
            let delta = CompiledQubo::flip_delta(&bits, &fields, i);
            // exp(-40) is below the resolution of the uniform draw
            let accept = delta <= 0.0 || (beta * delta < 40.0 && rng.gen::<f64>() < (-beta * delta).exp());
            if accept {
                c.apply_flip(&mut bits, &mut fields, i);
                energy += delta;
                if energy < best_energy - c.tol {
                    best_energy = energy;
                    best.copy_from_slice(&bits);
                }
            }
        }
    }

    let mut bits = best;
    let mut fields = c.fields(&bits);
    steepest_descent(c, &mut bits, &mut fields);
    (c.energy(&bits), bits)
}

/// Best 1-flip local optimum over all restarts. Deterministic for a fixed
/// schedule regardless of how restarts are scheduled on threads.
pub fn solve_anneal(m: &QuboModel, schedule: &AnnealSchedule) -> Result<Solution, SolveError> {
    schedule.validate()?;
    let c = CompiledQubo::new(m);
    let betas = schedule.betas();
    let runs: Vec<(f64, Vec<bool>)> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| run_restart(&c, &betas, schedule.seed, r as u64))
        .collect();
    let (_, bits) = runs
        .into_iter()
        .reduce(|a, b| if better((b.0, &b.1), (a.0, &a.1), c.tol) { b } else { a })
        .expect("at least one restart");
    let assignment = Assignment::from(bits);
    let energy = m.energy(&assignment).expect("length matches");
    Ok(Solution { assignment, energy })
}
