//! VQE and dVQE runs: ansatz + Hamiltonian + optimizer, plus the metrics
//! reported per run.

mod energy;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

pub use energy::{energy_objective, shot_estimate, EvalMode, ShotEstimate};

use crate::ansatz::{AnsatzKind, AnsatzSpec};
use crate::error::{Error, Result};
use crate::hamiltonians::{
    constrained_impurity_hamiltonian, heisenberg_hamiltonian, magnetization_observable,
    maxcut_hamiltonian, ImpuritySpec, WeightedGraph,
};
use crate::optimizer::{global_phase_cost, surrogate_then_local, OptFailure, OptTrace};
use crate::oracles::{brute_force_maxcut, exact_ground, MaxCutSolution};
use crate::pauli::PauliSum;
use crate::sim::{ParamCircuit, Statevector};

/// Heat-exchange angle held fixed during dVQE: the full swap, which places
/// the bath's frozen state on the impurity site.
pub const DVQE_SWAP_ANGLE: f64 = PI;

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSource {
    MaxCut(WeightedGraph),
    /// Open XXX chain `J Σ (XX+YY+ZZ) + h Σ Z`, optionally with a frozen
    /// impurity that sets the reference energy.
    Chain {
        n: usize,
        coupling: f64,
        field: f64,
        impurity: Option<ImpuritySpec>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub ansatz: AnsatzSpec,
    pub source: HamiltonianSource,
    pub eval_mode: EvalMode,
    pub budget: usize,
    pub seed: u64,
}

impl RunConfig {
    /// Parameters the optimizer actually moves (the dVQE swap angle is held).
    pub fn free_parameters(&self) -> Result<usize> {
        let n = self.ansatz.build()?.n_params();
        Ok(if self.ansatz.kind == AnsatzKind::HeDvqe { n - 1 } else { n })
    }

    /// Smallest budget the optimizer accepts for this configuration.
    pub fn minimum_budget(&self) -> Result<usize> {
        Ok(global_phase_cost(self.ansatz.n_problem) + 2 * self.free_parameters()?)
    }

    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        self.eval_mode.validate()?;
        match (&self.source, self.ansatz.kind) {
            (HamiltonianSource::MaxCut(g), AnsatzKind::HeMaxcut | AnsatzKind::HardwareEfficient)
                if g.n_nodes() == self.ansatz.n_problem => {}
            (HamiltonianSource::MaxCut(g), AnsatzKind::Qaoa)
                if self.ansatz.graph.as_ref() == Some(g) => {}
            (HamiltonianSource::Chain { n, impurity, .. }, AnsatzKind::HeDvqe)
                if *n == self.ansatz.n_problem && *impurity == self.ansatz.impurity => {}
            (HamiltonianSource::Chain { n, impurity: None, .. }, AnsatzKind::HardwareEfficient)
                if *n == self.ansatz.n_problem => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "ansatz {} does not match the Hamiltonian source",
                    self.ansatz.label()
                )))
            }
        }
        let min = self.minimum_budget()?;
        if self.budget < min {
            return Err(Error::InsufficientBudget {
                needed: min,
                available: self.budget,
            });
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<PauliSum> {
        match &self.source {
            HamiltonianSource::MaxCut(g) => Ok(maxcut_hamiltonian(g)),
            HamiltonianSource::Chain { n, coupling, field, .. } => {
                heisenberg_hamiltonian(*n, *coupling, *field)
            }
        }
    }
}

/// Output of one run. Every `series` column has one entry per evaluation
/// and describes the incumbent (best point so far) at that evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: RunConfig,
    pub trace: OptTrace,
    /// Full circuit parameter vector, including any held slot.
    pub best_params: Vec<f64>,
    pub best_energy: f64,
    pub series: BTreeMap<String, Vec<f64>>,
}

impl RunRecord {
    /// Final value of a series column.
    pub fn final_metric(&self, key: &str) -> Option<f64> {
        self.series.get(key).and_then(|s| s.last().copied())
    }

    /// Columns `eval_index,energy,best_so_far,<series...>,param_0..`.
    pub fn to_csv(&self) -> String {
        let k = self.trace.records.first().map_or(0, |r| r.params.len());
        let mut out = String::from("eval_index,energy,best_so_far");
        for key in self.series.keys() {
            write!(out, ",{key}").unwrap();
        }
        for i in 0..k {
            write!(out, ",param_{i}").unwrap();
        }
        out.push('\n');
        for (i, r) in self.trace.records.iter().enumerate() {
            write!(out, "{},{},{}", r.index, r.value, self.trace.best_so_far[i]).unwrap();
            for s in self.series.values() {
                write!(out, ",{}", s[i]).unwrap();
            }
            for p in &r.params {
                write!(out, ",{p}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// `α = -E / C_opt`.
pub fn approximation_ratio(best_energy: f64, c_opt: f64) -> Result<f64> {
    if !(c_opt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "approximation ratio needs C_opt > 0, got {c_opt}"
        )));
    }
    Ok(-best_energy / c_opt)
}

/// Probability that measuring the problem register (qubits `0..n`) yields an
/// optimal cut; bath qubits are marginalized.
pub fn prob_best_cut(state: &Statevector, solution: &MaxCutSolution, n_problem: usize) -> Result<f64> {
    if n_problem > state.n_qubits() {
        return Err(Error::Dimension(format!(
            "{n_problem}-node problem on a {}-qubit state",
            state.n_qubits()
        )));
    }
    Ok(state
        .marginal_low(n_problem)
        .iter()
        .enumerate()
        .filter(|(i, _)| solution.is_optimal(*i))
        .map(|(_, p)| p)
        .sum::<f64>()
        .min(1.0))
}

fn held_tail(ansatz: &AnsatzSpec) -> &'static [f64] {
    if ansatz.kind == AnsatzKind::HeDvqe {
        &[DVQE_SWAP_ANGLE]
    } else {
        &[]
    }
}

/// Reference energy for chain runs: the constrained-impurity ground energy
/// when an impurity is set, otherwise the chain's own ground energy.
pub fn chain_reference(source: &HamiltonianSource) -> Result<Option<f64>> {
    match source {
        HamiltonianSource::MaxCut(_) => Ok(None),
        HamiltonianSource::Chain { n, coupling, field, impurity } => {
            let h = match impurity {
                Some(imp) => constrained_impurity_hamiltonian(*n, *coupling, *field, *imp)?,
                None => heisenberg_hamiltonian(*n, *coupling, *field)?,
            };
            Ok(Some(exact_ground(&h)?.energy))
        }
    }
}

/// Runs the surrogate-then-local optimizer on the energy of the configured
/// ansatz. For HE-dVQE the heat-exchange angle is held at
/// [`DVQE_SWAP_ANGLE`] and only the `U` block is optimized.
///
/// Series columns: MaxCut runs get `alpha` and `p_best`; chain runs get
/// `error_rel` and `error_abs` against [`chain_reference`]. In shot mode
/// the series use the exact energy of the incumbent.
pub fn run_vqe(config: &RunConfig) -> std::result::Result<RunRecord, OptFailure> {
    config.validate()?;
    let circuit = config.ansatz.build()?;
    let h = config.hamiltonian()?;
    let tail = held_tail(&config.ansatz);
    // oracles first so a too-large instance fails before any evaluation
    let solution = match &config.source {
        HamiltonianSource::MaxCut(g) => Some(brute_force_maxcut(g)?),
        _ => None,
    };
    let reference = chain_reference(&config.source)?;

    let mut trace = {
        let mut obj = energy::pinned_energy_objective(&circuit, &h, config.eval_mode, tail)?;
        surrogate_then_local(&mut obj, config.ansatz.n_problem, config.budget, config.seed)?
    };
    for r in &mut trace.records {
        r.params.extend_from_slice(tail);
    }
    let best = trace.best().expect("budget covers at least one evaluation").clone();

    let series = incumbent_series(&trace, &circuit, &h, config.eval_mode, |state, energy| {
        let mut row = Vec::new();
        if let (Some(sol), HamiltonianSource::MaxCut(_)) = (&solution, &config.source) {
            row.push(("alpha", approximation_ratio(energy, sol.c_opt)?));
            row.push(("p_best", prob_best_cut(state, sol, config.ansatz.n_problem)?));
        }
        if let Some(e_ref) = reference {
            row.push(("error_abs", (energy - e_ref).abs()));
            row.push(("error_rel", relative_error(energy, e_ref)));
        }
        Ok(row)
    })?;

    Ok(RunRecord {
        config: config.clone(),
        best_params: best.params,
        best_energy: best.value,
        trace,
        series,
    })
}

fn relative_error(e: f64, e_ref: f64) -> f64 {
    if e_ref == 0.0 {
        (e - e_ref).abs()
    } else {
        (e - e_ref).abs() / e_ref.abs()
    }
}

fn incumbent_series(
    trace: &OptTrace,
    circuit: &ParamCircuit,
    h: &PauliSum,
    mode: EvalMode,
    mut metrics: impl FnMut(&Statevector, f64) -> Result<Vec<(&'static str, f64)>>,
) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut incumbent: Option<(f64, Vec<(&'static str, f64)>)> = None;
    for r in &trace.records {
        let improved = incumbent.as_ref().is_none_or(|(v, _)| r.value < *v);
        if improved {
            let state = circuit.run(&r.params)?;
            let energy = match mode {
                EvalMode::Exact => r.value,
                EvalMode::Shots { .. } => state.expectation(h)?,
            };
            incumbent = Some((r.value, metrics(&state, energy)?));
        }
        for (k, v) in &incumbent.as_ref().expect("set above").1 {
            series.entry((*k).to_string()).or_default().push(*v);
        }
    }
    Ok(series)
}

/// dVQE outcome: the run plus scalar results for the optimized state.
#[derive(Debug, Clone, PartialEq)]
pub struct DvqeResult {
    pub record: RunRecord,
    /// Exact `<H_chain>` at the best parameters.
    pub energy: f64,
    /// Constrained-impurity oracle ground energy.
    pub reference: f64,
    /// Unconstrained chain ground energy (variational lower bound).
    pub unconstrained: f64,
    pub error_rel: f64,
    pub error_abs: f64,
    /// `(1/n) Σ <Z_i>` over the system register.
    pub magnetization: f64,
}

/// [`run_vqe`] for an HE-dVQE configuration, with the oracle comparison.
pub fn run_dvqe(config: &RunConfig) -> std::result::Result<DvqeResult, OptFailure> {
    let HamiltonianSource::Chain { n, coupling, field, impurity: Some(_) } = config.source else {
        return Err(Error::InvalidArgument("dVQE needs a chain source with an impurity".into()).into());
    };
    if config.ansatz.kind != AnsatzKind::HeDvqe {
        return Err(Error::InvalidArgument("dVQE needs the HE-dVQE ansatz".into()).into());
    }
    let record = run_vqe(config)?;
    let circuit = config.ansatz.build()?;
    let state = circuit.run(&record.best_params)?;
    let energy = state.expectation(&config.hamiltonian()?)?;
    let reference = chain_reference(&config.source)?.expect("chain source");
    let unconstrained = exact_ground(&heisenberg_hamiltonian(n, coupling, field)?)?.energy;
    let magnetization = state.expectation(&magnetization_observable(n)?)?;
    Ok(DvqeResult {
        record,
        energy,
        reference,
        unconstrained,
        error_rel: relative_error(energy, reference),
        error_abs: (energy - reference).abs(),
        magnetization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{random_complete_graph, FrozenState};

    fn maxcut_config(seed: u64, budget: usize) -> RunConfig {
        let g = random_complete_graph(4, seed).unwrap();
        RunConfig {
            ansatz: AnsatzSpec::he_maxcut(4),
            source: HamiltonianSource::MaxCut(g),
            eval_mode: EvalMode::Exact,
            budget,
            seed,
        }
    }

    #[test]
    fn maxcut_record_is_consistent() {
        let cfg = maxcut_config(3, 60);
        let rec = run_vqe(&cfg).unwrap();
        assert!(rec.trace.len() <= 60);
        let min = rec.trace.records.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        assert_eq!(rec.best_energy, min);
        let alpha = rec.final_metric("alpha").unwrap();
        assert!(alpha <= 1.0 + 1e-9);
        let p = rec.final_metric("p_best").unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert_eq!(rec.series["alpha"].len(), rec.trace.len());
        assert_eq!(run_vqe(&cfg).unwrap(), rec);
    }

    #[test]
    fn minimum_budget_record() {
        let cfg = maxcut_config(1, 0);
        let min = cfg.minimum_budget().unwrap();
        assert!(run_vqe(&cfg).is_err());
        let rec = run_vqe(&RunConfig { budget: min, ..cfg }).unwrap();
        assert_eq!(rec.trace.len(), min);
        assert_eq!(rec.to_csv().lines().count(), min + 1);
    }

    #[test]
    fn mismatched_source_rejected() {
        let mut cfg = maxcut_config(1, 100);
        cfg.ansatz = AnsatzSpec::he_maxcut(5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn two_site_dvqe_reaches_oracle() {
        let imp = ImpuritySpec::new(1, FrozenState::Zero);
        let cfg = RunConfig {
            ansatz: AnsatzSpec::he_dvqe(2, imp, 1),
            source: HamiltonianSource::Chain {
                n: 2,
                coupling: 1.0,
                field: 0.0,
                impurity: Some(imp),
            },
            eval_mode: EvalMode::Exact,
            budget: 150,
            seed: 0,
        };
        let res = run_dvqe(&cfg).unwrap();
        assert!((res.reference - -1.0).abs() < 1e-12);
        assert!(res.error_abs < 1e-3, "{res:?}");
        assert!(res.energy >= res.unconstrained - 1e-9);
        assert_eq!(*res.record.best_params.last().unwrap(), DVQE_SWAP_ANGLE);
    }
}
