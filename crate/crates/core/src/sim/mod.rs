//! Dense statevector simulation.
//!
//! Amplitude ordering: qubit 0 is the least-significant bit of the basis
//! index. Bitstrings (sampling keys, MaxCut assignments) list qubit 0 first,
//! so `"10"` on two qubits is basis index 1.

mod circuit;
mod gate;
mod statevector;

pub use circuit::{apply_circuit, ParamCircuit};
pub use gate::{Angle, GateKind, GateOp};
pub use statevector::{
    apply_gate, bitstring_to_index, index_to_bitstring, Statevector, MAX_QUBITS,
};
