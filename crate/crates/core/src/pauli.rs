//! Real-weighted sums of Pauli strings.
//!
//! Every Hamiltonian and observable in the crate is a [`PauliSum`]. Terms with
//! identical operator content are merged on insertion, and identity terms are
//! folded into `constant_offset`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// One weighted Pauli string. `ops` never contains identity factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub ops: BTreeMap<usize, Pauli>,
}

/// Bit masks describing how a Pauli string acts on a computational basis
/// state: `P|i> = i^{n_y} (-1)^{popcount(i & phase_mask)} |i ^ flip_mask>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMasks {
    pub flip_mask: usize,
    pub phase_mask: usize,
    pub n_y: u32,
}

impl PauliTerm {
    pub fn masks(&self) -> PauliMasks {
        let mut flip_mask = 0;
        let mut phase_mask = 0;
        let mut n_y = 0;
        for (&q, &p) in &self.ops {
            match p {
                Pauli::X => flip_mask |= 1 << q,
                Pauli::Y => {
                    flip_mask |= 1 << q;
                    phase_mask |= 1 << q;
                    n_y += 1;
                }
                Pauli::Z => phase_mask |= 1 << q,
            }
        }
        PauliMasks {
            flip_mask,
            phase_mask,
            n_y,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.ops.values().all(|&p| p == Pauli::Z)
    }

    /// Highest qubit index touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.keys().next_back().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    constant_offset: f64,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
            constant_offset: 0.0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn constant_offset(&self) -> f64 {
        self.constant_offset
    }

    pub fn add_constant(&mut self, value: f64) {
        self.constant_offset += value;
    }

    /// Adds `coeff * P` where `P` is the product of `ops`. Repeated qubits in
    /// `ops` are rejected; an empty `ops` adds to the constant offset.
    pub fn add_term(&mut self, coeff: f64, ops: &[(usize, Pauli)]) -> Result<()> {
        if !coeff.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient {coeff}"
            )));
        }
        let mut map = BTreeMap::new();
        for &(q, p) in ops {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if map.insert(q, p).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q} appears twice in one Pauli string"
                )));
            }
        }
        if map.is_empty() {
            self.constant_offset += coeff;
            return Ok(());
        }
        match self.terms.iter_mut().find(|t| t.ops == map) {
            Some(existing) => existing.coeff += coeff,
            None => self.terms.push(PauliTerm { coeff, ops: map }),
        }
        Ok(())
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(PauliTerm::is_diagonal)
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.constant_offset.abs() + self.terms.iter().map(|t| t.coeff.abs()).sum::<f64>()
    }

    /// Same operator embedded in a larger register (identity on the extra qubits).
    pub fn padded(&self, n_qubits: usize) -> Result<Self> {
        if n_qubits < self.n_qubits {
            return Err(Error::Dimension(format!(
                "cannot shrink a {}-qubit operator to {n_qubits} qubits",
                self.n_qubits
            )));
        }
        let mut out = self.clone();
        out.n_qubits = n_qubits;
        Ok(out)
    }

    /// Diagonal matrix element `<i|H|i>` for a diagonal sum.
    pub fn diagonal_value(&self, index: usize) -> f64 {
        let mut acc = self.constant_offset;
        for t in &self.terms {
            let m = t.masks();
            if m.flip_mask != 0 {
                continue;
            }
            let sign = if (index & m.phase_mask).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            acc += t.coeff * sign;
        }
        acc
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant_offset)?;
        for t in &self.terms {
            write!(f, " + {}*", t.coeff)?;
            for (q, p) in &t.ops {
                write!(f, "{p}{q}")?;
            }
        }
        Ok(())
    }
}
