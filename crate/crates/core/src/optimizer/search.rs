//! Surrogate global phase and the combined global-then-local driver.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::optimizer::{gp_fit, imfil_minimize, Objective, OptFailure, OptTrace, Recorder};

pub const RETRAINING_ROUNDS: usize = 3;

/// Largest qubit count accepted for sizing the initial design.
const MAX_DESIGN_QUBITS: usize = 20;
const MEAN_SEARCH_STARTS: usize = 16;
// Proposals closer than this (unit-box, max-norm) to an evaluated point are skipped.
const DUPLICATE_TOL: f64 = 1e-9;

pub(crate) fn latin_hypercube_unit(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; dim]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for d in 0..dim {
        strata.shuffle(rng);
        for (p, &s) in points.iter_mut().zip(&strata) {
            p[d] = (s as f64 + rng.gen::<f64>()) / n as f64;
        }
    }
    points
}

/// `n` Latin-hypercube samples inside `bounds`.
pub fn latin_hypercube(n: usize, bounds: &[(f64, f64)], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    latin_hypercube_unit(n, bounds.len(), &mut rng)
        .into_iter()
        .map(|u| {
            u.iter()
                .zip(bounds)
                .map(|(v, &(lo, hi))| (lo + v * (hi - lo)).clamp(lo, hi))
                .collect()
        })
        .collect()
}

/// `max(2, ceil(0.1 * 2^n_qubits))`.
pub fn initial_sample_count(n_qubits: usize) -> usize {
    let n = 1usize << n_qubits.min(MAX_DESIGN_QUBITS);
    n.div_ceil(10).max(2)
}

/// Evaluations spent by [`gp_global_search`]: the initial design plus one
/// proposal per retraining round.
pub fn global_phase_cost(n_qubits: usize) -> usize {
    initial_sample_count(n_qubits) + RETRAINING_ROUNDS
}

#[derive(Debug, Clone)]
pub struct GlobalSearchResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub trace: OptTrace,
}

/// Latin-hypercube design followed by [`RETRAINING_ROUNDS`] rounds of GP
/// fitting, each evaluating the minimizer of the posterior mean.
pub fn gp_global_search(
    obj: &mut Objective<'_>,
    n_qubits: usize,
    seed: u64,
) -> Result<GlobalSearchResult, OptFailure> {
    if n_qubits > MAX_DESIGN_QUBITS {
        return Err(Error::TooLarge(format!(
            "initial design for {n_qubits} qubits (limit {MAX_DESIGN_QUBITS})"
        ))
        .into());
    }
    let bounds = obj.bounds().to_vec();
    let mut rec = Recorder::new(obj, global_phase_cost(n_qubits));
    for x in latin_hypercube(initial_sample_count(n_qubits), &bounds, seed) {
        rec.eval(&x)?;
    }

    for round in 0..RETRAINING_ROUNDS {
        let xs: Vec<Vec<f64>> = rec.trace.records.iter().map(|r| r.params.clone()).collect();
        let ys: Vec<f64> = rec.trace.records.iter().map(|r| r.value).collect();
        let n = ys.len() as f64;
        let mean = ys.iter().sum::<f64>() / n;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
        let floor = if var > 0.0 { rec.obj.noise_variance() / var } else { 0.0 };
        let model = match gp_fit(&xs, &ys, &bounds, floor) {
            Ok(m) => m,
            Err(e) => return Err(rec.fail(e)),
        };
        let round_seed = seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(round as u64 + 1));
        let proposal = model
            .minimize_mean(MEAN_SEARCH_STARTS, round_seed)
            .into_iter()
            .map(|(x, _)| x)
            .find(|x| !xs.iter().any(|e| unit_distance(x, e, &bounds) <= DUPLICATE_TOL));
        // every candidate is already evaluated: another round would refit the same data
        let Some(x) = proposal else { break };
        rec.eval(&x)?;
    }

    let trace = rec.trace;
    let best = trace.best().expect("initial design is non-empty").clone();
    Ok(GlobalSearchResult {
        best_params: best.params,
        best_value: best.value,
        trace,
    })
}

fn unit_distance(a: &[f64], b: &[f64], bounds: &[(f64, f64)]) -> f64 {
    a.iter()
        .zip(b)
        .zip(bounds)
        .map(|((x, y), (lo, hi))| (x - y).abs() / (hi - lo))
        .fold(0.0, f64::max)
}

/// [`gp_global_search`] followed by [`imfil_minimize`] from its incumbent
/// with whatever budget is left. Needs room for the global phase plus one
/// full stencil.
pub fn surrogate_then_local(
    obj: &mut Objective<'_>,
    n_qubits: usize,
    total_budget: usize,
    seed: u64,
) -> Result<OptTrace, OptFailure> {
    let needed = global_phase_cost(n_qubits) + 2 * obj.arity();
    if total_budget < needed {
        return Err(Error::InsufficientBudget {
            needed,
            available: total_budget,
        }
        .into());
    }
    let global = gp_global_search(obj, n_qubits, seed)?;
    let mut trace = global.trace;
    let remaining = total_budget - trace.len();
    match imfil_minimize(
        obj,
        &global.best_params,
        Some(global.best_value),
        remaining,
        seed.wrapping_add(1),
    ) {
        Ok(local) => {
            trace.extend(local);
            Ok(trace)
        }
        Err(f) => {
            trace.extend(f.partial);
            Err(OptFailure::new(f.error, trace))
        }
    }
}
