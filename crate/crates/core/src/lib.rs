//! Ground-state search for the Fermi-Hubbard model on honeycomb lattices.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`] – exact algebra over Pauli strings and weighted sums.
//! * [`lattice`] – zig-zag honeycomb geometries and the site/spin to qubit map.
//! * [`fermion`] – Jordan-Wigner ladder operators and the Hubbard Hamiltonians.
//! * [`cdsynth`] – nested-commutator gauge potentials and the two-body CD pool.
//! * [`statevec`] – the statevector engine: gates, circuits, noise, sampling.
//! * [`stateprep`] – Givens-network preparation of the hopping ground state.
//! * [`evolve`] – annealing schedule and Trotterized (CD-assisted) evolution.
//! * [`measure`] – grouped shot-based energy estimation with FSWAP routing.
//! * [`vqa`] – HV and CD-inspired ansätze, adjoint gradients and Adagrad.
//! * [`oracle`] – dense and particle-number-sector Lanczos reference energies.
//! * [`gatecount`] – decomposition into basic gates and resource accounting.

pub mod cdsynth;
pub mod error;
pub mod evolve;
pub mod fermion;
pub mod gatecount;
pub mod lattice;
pub mod measure;
pub mod oracle;
pub mod pauli;
pub mod stateprep;
pub mod statevec;
pub mod vqa;

pub use error::{Error, Result};
pub use num_complex::Complex64;
