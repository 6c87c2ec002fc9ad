//! Maximal end-to-end entanglement in engineered XX spin chains and state
//! teleportation over the resulting Bell pair.
//!
//! A centre-excited odd chain with the engineered couplings evolves into
//! `(|10⟩ + |01⟩)/√2` on its end qubits at `t₀ = π/μ`, independently of the
//! chain length. The crate builds those chains ([`chain`]), evolves them in
//! the one-excitation sector ([`eigen`], [`dynamics`]), teleports a qubit
//! through the resulting pair ([`teleport`]), measures how coupling errors
//! degrade the pair ([`robustness`]) and searches for other coupling profiles
//! with the same property ([`search`]).
//!
//! Batch drivers take an [`Exec`]; with the default `parallel` feature they
//! run on rayon.

pub mod chain;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod robustness;
pub mod search;
pub mod teleport;

pub use chain::{
    engineered_couplings, full_hilbert_hamiltonian, halved_hamiltonian, one_excitation_hamiltonian,
    validate_profile, CouplingProfile, TridiagonalHamiltonian,
};
pub use dynamics::{SiteAmplitudeState, C64};
pub use eigen::{eigendecompose, EigenSystem, Parity};
pub use error::{Error, Result};
pub use exec::Exec;
