//! Simulation toolkit for the quantum artificial life protocol.
//!
//! Individuals are genotype/phenotype qubit pairs. Self-replication copies
//! `<σz>` of a genotype into blank qubits with CNOTs, the environment is
//! modelled either by small `σy` rotations or by amplitude damping towards
//! `|0>`, mutations are `σx` flips on genotypes, and two individuals
//! interact through a four-qubit gate that exchanges phenotypes
//! conditioned on the genotypes.
//!
//! Layout:
//! - [`sim`]: dense statevector / density-matrix engine for up to five qubits.
//! - [`gates`]: gate constructors and CNOT-level decompositions.
//! - [`lindblad`]: single-qubit dissipation, lifetimes and the rotation
//!   consistency analysis.
//! - [`protocol`]: builders for the five experiments.
//! - [`analysis`]: counts post-processing and comparison reports.
//! - [`noise`]: a small depolarizing + readout noise model with grid fitting.
//! - [`reference`]: the measured/predicted tables shipped as CSV assets.

pub mod analysis;
pub mod counts;
pub mod error;
pub mod gates;
pub mod lindblad;
pub mod noise;
pub mod protocol;
pub mod reference;
pub mod sim;

pub use counts::{BasisOrder, CountsTable};
pub use error::{Error, Result};
pub use num_complex::Complex64;
