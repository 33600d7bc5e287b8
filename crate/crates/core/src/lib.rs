//! Heisenberg spin-1/2 chains, their bosonic encodings (Holstein-Primakoff
//! and Dyson-Maleev), and the circuit-QED Josephson junction array that
//! realizes them.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`] holds the declarative spin and circuit specifications.
//! * [`hilbert`] indexes tensor-product Fock bases and builds product states.
//! * [`sparse`] and [`operators`] construct every Hamiltonian and observable
//!   as a compressed-row complex matrix.
//! * [`mapping`] converts circuit energies into oscillator parameters and
//!   spin couplings, forward and inverse.
//! * [`dynamics`] propagates states with a spectral or Krylov propagator.
//! * [`verify`] compares projected Hamiltonians and trajectories.
//!
//! Energies are ordinary frequencies in MHz and times are in microseconds,
//! see [`units`].

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod mapping;
pub mod model;
pub mod operators;
pub mod sparse;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use hilbert::{FockBasis, InitialState, Sector, StateVector};
pub use mapping::JjaParams;
pub use model::{BoundaryLinks, CircuitSpec, SpinModelSpec};
pub use sparse::SparseOperator;

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
