//! Energy objectives: exact expectation or per-term shot estimates.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::optimizer::Objective;
use crate::pauli::{Pauli, PauliSum};
use crate::sim::{Angle, GateOp, ParamCircuit, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    /// Each Pauli term is estimated from `count` fresh samples.
    Shots { count: usize, seed: u64 },
}

impl EvalMode {
    pub fn validate(&self) -> Result<()> {
        match self {
            EvalMode::Shots { count: 0, .. } => {
                Err(Error::InvalidArgument("shot count must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Shot-based estimate of `<H>` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotEstimate {
    pub value: f64,
    pub std_error: f64,
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Estimates `<H>` by measuring every term independently in its rotated
/// basis (`H` for X, `S†H` for Y) with `shots` samples each.
///
/// The standard error is `sqrt(Σ c_k² (1 - e_k²) / shots)` with `e_k` the
/// sampled term mean.
pub fn shot_estimate(state: &Statevector, h: &PauliSum, shots: usize, seed: u64) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be at least 1".into()));
    }
    if h.n_qubits() > state.n_qubits() {
        return Err(Error::Dimension(format!(
            "{}-qubit observable on {}-qubit state",
            h.n_qubits(),
            state.n_qubits()
        )));
    }
    let mut value = h.constant_offset();
    let mut var = 0.0;
    for (k, term) in h.terms().iter().enumerate() {
        let mut rotated = state.clone();
        let mut mask = 0usize;
        for (&q, &p) in &term.ops {
            mask |= 1 << q;
            match p {
                Pauli::Z => {}
                Pauli::X => rotated.apply(&GateOp::h(q), None)?,
                Pauli::Y => {
                    rotated.apply(&GateOp::rz(q, Angle::Fixed(-FRAC_PI_2)), None)?;
                    rotated.apply(&GateOp::h(q), None)?;
                }
            }
        }
        let counts = rotated.sample_indices(shots, splitmix(seed ^ splitmix(k as u64)))?;
        let signed: i64 = counts
            .iter()
            .map(|(&idx, &c)| {
                let c = c as i64;
                if (idx & mask).count_ones().is_multiple_of(2) {
                    c
                } else {
                    -c
                }
            })
            .sum();
        let mean = signed as f64 / shots as f64;
        value += term.coeff * mean;
        var += term.coeff * term.coeff * (1.0 - mean * mean);
    }
    Ok(ShotEstimate {
        value,
        std_error: (var.max(0.0) / shots as f64).sqrt(),
    })
}

/// Energy as a function of the circuit parameters. `pinned_tail` values are
/// appended to every parameter vector, so those trailing slots are held
/// fixed and excluded from the objective's arity.
pub(crate) fn pinned_energy_objective<'a>(
    circuit: &'a ParamCircuit,
    h: &'a PauliSum,
    mode: EvalMode,
    pinned_tail: &'a [f64],
) -> Result<Objective<'a>> {
    mode.validate()?;
    if h.n_qubits() > circuit.n_qubits() {
        return Err(Error::Dimension(format!(
            "{}-qubit Hamiltonian on a {}-qubit circuit",
            h.n_qubits(),
            circuit.n_qubits()
        )));
    }
    let n_params = circuit.n_params();
    if pinned_tail.len() > n_params {
        return Err(Error::ParamCount {
            expected: n_params,
            got: pinned_tail.len(),
        });
    }
    let bounds = circuit.bounds()[..n_params - pinned_tail.len()].to_vec();
    let full = move |x: &[f64]| -> Vec<f64> { x.iter().chain(pinned_tail).copied().collect() };
    match mode {
        EvalMode::Exact => Objective::new(bounds, move |x| circuit.run(&full(x))?.expectation(h)),
        EvalMode::Shots { count, seed } => {
            let mut calls = 0u64;
            let noise: f64 = h.terms().iter().map(|t| t.coeff * t.coeff).sum::<f64>() / count as f64;
            Ok(Objective::new(bounds, move |x| {
                calls += 1;
                let state = circuit.run(&full(x))?;
                Ok(shot_estimate(&state, h, count, splitmix(seed ^ splitmix(calls)))?.value)
            })?
            .with_noise_variance(noise))
        }
    }
}

/// `θ ↦ <ψ(θ)|H|ψ(θ)>`. A Hamiltonian on fewer qubits than the circuit acts
/// as identity on the rest.
pub fn energy_objective<'a>(circuit: &'a ParamCircuit, h: &'a PauliSum, mode: EvalMode) -> Result<Objective<'a>> {
    pinned_energy_objective(circuit, h, mode, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::he_maxcut_ansatz;
    use crate::hamiltonians::{maxcut_hamiltonian, random_complete_graph};
    use std::f64::consts::PI;

    #[test]
    fn he_basis_points_give_minus_cut() {
        let g = random_complete_graph(4, 2).unwrap();
        let h = maxcut_hamiltonian(&g);
        let c = he_maxcut_ansatz(4).unwrap();
        let mut obj = energy_objective(&c, &h, EvalMode::Exact).unwrap();
        for z in 0..16usize {
            let theta: Vec<f64> = (0..4).map(|q| if z >> q & 1 == 1 { PI } else { 0.0 }).collect();
            let e = obj.evaluate(&theta).unwrap();
            assert!((e + g.cut_value_index(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn offset_only_is_constant() {
        let mut h = PauliSum::new(2);
        h.add_constant(-1.25);
        let c = he_maxcut_ansatz(2).unwrap();
        let mut obj = energy_objective(&c, &h, EvalMode::Exact).unwrap();
        assert_eq!(obj.evaluate(&[0.3, 2.0]).unwrap(), -1.25);
        let mut shots = energy_objective(&c, &h, EvalMode::Shots { count: 10, seed: 1 }).unwrap();
        assert_eq!(shots.evaluate(&[0.3, 2.0]).unwrap(), -1.25);
    }

    #[test]
    fn y_rotation_reads_plus_i() {
        // RX(-π/2)|0> = |+i>, a +1 eigenstate of Y
        let mut s = Statevector::basis(1, &[]).unwrap();
        s.apply(&GateOp::rx(0, Angle::Fixed(-FRAC_PI_2)), None).unwrap();
        let mut y = PauliSum::new(1);
        y.add_term(1.0, &[(0, Pauli::Y)]).unwrap();
        assert!((s.expectation(&y).unwrap() - 1.0).abs() < 1e-12);
        let est = shot_estimate(&s, &y, 100, 4).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn rejects_wide_hamiltonian_and_zero_shots() {
        let c = he_maxcut_ansatz(2).unwrap();
        let h = PauliSum::new(5);
        assert!(energy_objective(&c, &h, EvalMode::Exact).is_err());
        let h = PauliSum::new(2);
        assert!(energy_objective(&c, &h, EvalMode::Shots { count: 0, seed: 0 }).is_err());
    }
}
