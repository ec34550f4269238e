//! Statevector simulation and derivative-free variational optimization with
//! heat-exchange (XX+YY partial-iSWAP) cooling ansatze.
//!
//! The crate is organised bottom-up:
//!
//! * [`sim`]: dense statevector simulator, gates, parameterized circuits.
//! * [`pauli`]: real-weighted Pauli sums.
//! * [`hamiltonians`]: MaxCut, Heisenberg chain, frozen-impurity builders.
//! * [`ansatz`]: heat-exchange, QAOA, RealAmplitudes and HE-dVQE circuits.
//! * [`optimizer`]: Gaussian-process surrogate search plus implicit filtering.
//! * [`vqe`]: objectives, run drivers and MaxCut / impurity metrics.
//! * [`oracles`]: brute-force MaxCut, dense diagonalization, Lindblad RK4.

// NaN must fail range checks, so `!(a < b)` is intended
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod error;
pub mod hamiltonians;
pub mod optimizer;
pub mod oracles;
pub mod pauli;
pub mod sim;
pub mod vqe;

pub use error::{Error, Result};
