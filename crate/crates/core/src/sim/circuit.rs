use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sim::gate::{Angle, GateKind, GateOp};
use crate::sim::statevector::Statevector;

/// Ordered gate list over a register whose initial state is a basis state,
/// plus bounded parameter slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    initial_ones: Vec<usize>,
    gates: Vec<GateOp>,
    bounds: Vec<(f64, f64)>,
}

impl ParamCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            initial_ones: Vec::new(),
            gates: Vec::new(),
            bounds: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn initial_ones(&self) -> &[usize] {
        &self.initial_ones
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn n_params(&self) -> usize {
        self.bounds.len()
    }

    /// Marks `q` as prepared in `|1>`.
    pub fn prepare_one(&mut self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        if !self.initial_ones.contains(&q) {
            self.initial_ones.push(q);
            self.initial_ones.sort_unstable();
        }
        Ok(())
    }

    /// Declares a new parameter slot and returns its index.
    pub fn add_slot(&mut self, lo: f64, hi: f64) -> Result<usize> {
        let slot = self.bounds.len();
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidBounds { slot, lo, hi });
        }
        self.bounds.push((lo, hi));
        Ok(slot)
    }

    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        for &q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if let Some(slot) = gate.slot() {
            if slot >= self.bounds.len() {
                return Err(Error::UnknownSlot(slot));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.bounds.len() {
            return Err(Error::ParamCount {
                expected: self.bounds.len(),
                got: params.len(),
            });
        }
        for (index, (&value, &(lo, hi))) in params.iter().zip(&self.bounds).enumerate() {
            if !(lo..=hi).contains(&value) {
                return Err(Error::ParamOutOfBounds {
                    index,
                    value,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<Statevector> {
        Statevector::basis(self.n_qubits, &self.initial_ones)
    }

    /// Runs the circuit on its initial basis state. Out-of-bounds parameters
    /// are rejected, never clamped.
    pub fn run(&self, params: &[f64]) -> Result<Statevector> {
        self.check_params(params)?;
        let mut state = self.initial_state()?;
        for gate in &self.gates {
            let binding = gate.slot().map(|s| params[s]);
            state.apply(gate, binding)?;
        }
        Ok(state)
    }

    /// Line-oriented text form: `QUBITS n`, `INIT q..`, `SLOT k lo hi`, then one
    /// `GATE q0 [q1] [p<slot>[*scale]|angle]` per gate.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "QUBITS {}", self.n_qubits).unwrap();
        out.push_str("INIT");
        for q in &self.initial_ones {
            write!(out, " {q}").unwrap();
        }
        out.push('\n');
        for (k, (lo, hi)) in self.bounds.iter().enumerate() {
            writeln!(out, "SLOT {k} {lo:?} {hi:?}").unwrap();
        }
        for g in &self.gates {
            writeln!(out, "{g}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut circuit: Option<ParamCircuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let perr = |msg: String| Error::Parse { line, msg };
            let toks: Vec<&str> = raw.split_whitespace().collect();
            let Some((&head, rest)) = toks.split_first() else {
                continue;
            };
            if head == "QUBITS" {
                let n = rest
                    .first()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| perr("QUBITS needs a count".into()))?;
                circuit = Some(ParamCircuit::new(n));
                continue;
            }
            let c = circuit
                .as_mut()
                .ok_or_else(|| perr("QUBITS header must come first".into()))?;
            match head {
                "INIT" => {
                    for t in rest {
                        let q = t.parse().map_err(|_| perr(format!("bad qubit {t:?}")))?;
                        c.prepare_one(q)?;
                    }
                }
                "SLOT" => {
                    let nums: Vec<f64> = rest
                        .iter()
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| perr(e.to_string()))?;
                    if nums.len() != 3 || nums[0] as usize != c.bounds.len() {
                        return Err(perr("SLOT lines must be `SLOT k lo hi` in order".into()));
                    }
                    c.add_slot(nums[1], nums[2])?;
                }
                name => {
                    let kind: GateKind = name.parse().map_err(perr)?;
                    let nq = kind.arity();
                    if rest.len() < nq {
                        return Err(perr(format!("{name} needs {nq} qubit(s)")));
                    }
                    let qubits: Vec<usize> = rest[..nq]
                        .iter()
                        .map(|t| t.parse())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| perr("bad qubit index".into()))?;
                    let angle = match rest.get(nq) {
                        None => None,
                        Some(tok) => Some(parse_angle(tok).map_err(perr)?),
                    };
                    c.push(GateOp::new(kind, &qubits, angle)?)?;
                }
            }
        }
        circuit.ok_or(Error::Parse {
            line: 0,
            msg: "empty circuit description".into(),
        })
    }
}

fn parse_angle(tok: &str) -> std::result::Result<Angle, String> {
    if let Some(rest) = tok.strip_prefix('p') {
        let (idx, scale) = match rest.split_once('*') {
            Some((i, s)) => (i, s.parse::<f64>().map_err(|e| e.to_string())?),
            None => (rest, 1.0),
        };
        let index = idx.parse().map_err(|_| format!("bad slot {tok:?}"))?;
        Ok(Angle::Slot { index, scale })
    } else {
        tok.parse::<f64>()
            .map(Angle::Fixed)
            .map_err(|_| format!("bad angle {tok:?}"))
    }
}

/// Value-semantic alias for [`ParamCircuit::run`].
pub fn apply_circuit(circuit: &ParamCircuit, params: &[f64]) -> Result<Statevector> {
    circuit.run(params)
}
