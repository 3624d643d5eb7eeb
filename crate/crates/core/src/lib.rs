//! A single spin coupled to an infinitely coordinated Ising chain.
//!
//! The chain is described by collective spin operators, which turns it into a
//! Lipkin–Meshkov–Glick model whose field depends on the state of the single
//! spin. The crate provides
//!
//! * finite-N Hamiltonians in the Dicke basis ([`spin`]),
//! * exact spectra and the energy-dependent effective Hamiltonian
//!   ([`spectrum`]),
//! * strong-coupling level pairs ([`perturbative`]),
//! * classical energy surfaces, their stationary points and extremum
//!   configurations ([`landscape`]),
//! * phase-diagram sweeps over the chain and coupling strengths ([`diagram`]).

pub mod diagram;
pub mod error;
pub mod landscape;
pub mod perturbative;
mod roots;
pub mod spectrum;
pub mod spin;

pub use error::{Error, Result};
pub use spin::{Branch, ModelParams, Spin};
