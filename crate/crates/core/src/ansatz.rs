//! Parameterized circuit families.
//!
//! Rotation slots are bounded to `[-π, π]`. Heat-exchange (XY) slots are
//! bounded to `[0, π]`: `θ = π` is the complete population swap between a
//! problem qubit and its bath partner, so the range covers "no transfer" to
//! "full bit flip".

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{FrozenState, ImpuritySpec, WeightedGraph};
use crate::sim::{Angle, GateOp, ParamCircuit};

pub const ROTATION_BOUNDS: (f64, f64) = (-PI, PI);
pub const HE_BOUNDS: (f64, f64) = (0.0, PI);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    HeMaxcut,
    Qaoa,
    HardwareEfficient,
    HeDvqe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub n_problem: usize,
    /// QAOA depth `p`, or RealAmplitudes repetitions. Ignored for `HeMaxcut`.
    pub reps_or_p: usize,
    pub graph: Option<WeightedGraph>,
    pub impurity: Option<ImpuritySpec>,
}

impl AnsatzSpec {
    pub fn he_maxcut(n: usize) -> Self {
        Self {
            kind: AnsatzKind::HeMaxcut,
            n_problem: n,
            reps_or_p: 1,
            graph: None,
            impurity: None,
        }
    }

    pub fn qaoa(graph: WeightedGraph, p: usize) -> Self {
        Self {
            kind: AnsatzKind::Qaoa,
            n_problem: graph.n_nodes(),
            reps_or_p: p,
            graph: Some(graph),
            impurity: None,
        }
    }

    pub fn hardware_efficient(n: usize, reps: usize) -> Self {
        Self {
            kind: AnsatzKind::HardwareEfficient,
            n_problem: n,
            reps_or_p: reps,
            graph: None,
            impurity: None,
        }
    }

    pub fn he_dvqe(n_system: usize, impurity: ImpuritySpec, reps: usize) -> Self {
        Self {
            kind: AnsatzKind::HeDvqe,
            n_problem: n_system,
            reps_or_p: reps,
            graph: None,
            impurity: Some(impurity),
        }
    }

    /// Short label used in file names and summaries, e.g. `qaoa_p2`.
    pub fn label(&self) -> String {
        match self.kind {
            AnsatzKind::HeMaxcut => "he".into(),
            AnsatzKind::Qaoa => format!("qaoa_p{}", self.reps_or_p),
            AnsatzKind::HardwareEfficient => format!("hea_r{}", self.reps_or_p),
            AnsatzKind::HeDvqe => format!("he_dvqe_r{}", self.reps_or_p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps_or_p == 0 {
            return Err(Error::InvalidArgument("reps / p must be at least 1".into()));
        }
        match self.kind {
            AnsatzKind::Qaoa if self.graph.is_none() => {
                Err(Error::InvalidArgument("QAOA ansatz needs a graph".into()))
            }
            AnsatzKind::HeDvqe => match self.impurity {
                None => Err(Error::InvalidArgument("HE-dVQE ansatz needs an impurity".into())),
                Some(imp) => imp.check(self.n_problem),
            },
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<ParamCircuit> {
        self.validate()?;
        match self.kind {
            AnsatzKind::HeMaxcut => he_maxcut_ansatz(self.n_problem),
            AnsatzKind::Qaoa => qaoa_ansatz(self.graph.as_ref().expect("validated"), self.reps_or_p),
            AnsatzKind::HardwareEfficient => hardware_efficient_ansatz(self.n_problem, self.reps_or_p),
            AnsatzKind::HeDvqe => he_dvqe_ansatz(
                self.n_problem,
                self.impurity.expect("validated"),
                self.reps_or_p,
            ),
        }
    }
}

/// Heat-exchange cooling block on `2n` qubits: problem qubits `0..n` start in
/// `|0>`, bath qubits `n..2n` in `|1>`, and each pair `(j, n + j)` is coupled
/// by one `XY(θ_j)`.
pub fn he_cooling_block(n_problem: usize) -> Result<ParamCircuit> {
    let mut c = ParamCircuit::new(2 * n_problem);
    for j in 0..n_problem {
        c.prepare_one(n_problem + j)?;
    }
    for j in 0..n_problem {
        let slot = c.add_slot(HE_BOUNDS.0, HE_BOUNDS.1)?;
        c.push(GateOp::xy(j, n_problem + j, Angle::slot(slot))?)?;
    }
    Ok(c)
}

pub fn he_maxcut_ansatz(n: usize) -> Result<ParamCircuit> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "HE MaxCut ansatz needs n >= 2, got {n}"
        )));
    }
    he_cooling_block(n)
}

/// QAOA with slots ordered `[γ_1, β_1, γ_2, β_2, ...]`. The cost layer applies
/// `RZZ(2 γ w_ij)` on every edge and the mixer `RX(2 β)` on every qubit.
pub fn qaoa_ansatz(graph: &WeightedGraph, p: usize) -> Result<ParamCircuit> {
    if p == 0 {
        return Err(Error::InvalidArgument("QAOA depth p must be at least 1".into()));
    }
    let n = graph.n_nodes();
    let mut c = ParamCircuit::new(n);
    for q in 0..n {
        c.push(GateOp::h(q))?;
    }
    for _ in 0..p {
        let gamma = c.add_slot(ROTATION_BOUNDS.0, ROTATION_BOUNDS.1)?;
        let beta = c.add_slot(ROTATION_BOUNDS.0, ROTATION_BOUNDS.1)?;
        for (i, j, w) in graph.edges() {
            c.push(GateOp::rzz(
                i,
                j,
                Angle::Slot {
                    index: gamma,
                    scale: 2.0 * w,
                },
            )?)?;
        }
        for q in 0..n {
            c.push(GateOp::rx(
                q,
                Angle::Slot {
                    index: beta,
                    scale: 2.0,
                },
            ))?;
        }
    }
    Ok(c)
}

/// RealAmplitudes: an RY layer, then `reps` times a linear CX ladder
/// `i -> i+1` followed by another RY layer.
pub fn hardware_efficient_ansatz(n: usize, reps: usize) -> Result<ParamCircuit> {
    if reps == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "hardware-efficient ansatz needs n >= 1 and reps >= 1".into(),
        ));
    }
    let mut c = ParamCircuit::new(n);
    append_real_amplitudes(&mut c, n, reps)?;
    Ok(c)
}

fn append_real_amplitudes(c: &mut ParamCircuit, n: usize, reps: usize) -> Result<()> {
    let ry_layer = |c: &mut ParamCircuit| -> Result<()> {
        for q in 0..n {
            let s = c.add_slot(ROTATION_BOUNDS.0, ROTATION_BOUNDS.1)?;
            c.push(GateOp::ry(q, Angle::slot(s)))?;
        }
        Ok(())
    };
    ry_layer(c)?;
    for _ in 0..reps {
        for q in 0..n.saturating_sub(1) {
            c.push(GateOp::cx(q, q + 1)?)?;
        }
        ry_layer(c)?;
    }
    Ok(())
}

/// RealAmplitudes `U` on the system followed by one heat-exchange gate between
/// the impurity site and a bath qubit (index `n_system`) prepared in the
/// frozen state. The XY slot is the last parameter.
pub fn he_dvqe_ansatz(n_system: usize, impurity: ImpuritySpec, reps: usize) -> Result<ParamCircuit> {
    impurity.check(n_system)?;
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    let bath = n_system;
    let mut c = ParamCircuit::new(n_system + 1);
    if impurity.frozen == FrozenState::One {
        c.prepare_one(bath)?;
    }
    append_real_amplitudes(&mut c, n_system, reps)?;
    let slot = c.add_slot(HE_BOUNDS.0, HE_BOUNDS.1)?;
    c.push(GateOp::xy(impurity.site, bath, Angle::slot(slot))?)?;
    Ok(c)
}
