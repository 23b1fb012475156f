//! Dense complex linear-algebra engine for small registers.
//!
//! Qubit 0 is the most significant bit of a basis index, so the ket
//! `|g1 p1 g2 p2>` with label `"0110"` lives at index 6.

mod density;
mod distribution;
mod gate;
mod pauli;
mod sampling;
mod state;

pub use density::{state_fidelity, DensityMatrix};
pub use distribution::Distribution;
pub use gate::{embed, GateMatrix, MAX_QUBITS};
pub use pauli::{Pauli, PauliString};
pub use sampling::sample_counts;
pub use state::StateVector;

pub(crate) use gate::qubit_mask;
