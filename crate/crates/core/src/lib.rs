//! Harmonic oscillator on a one-dimensional lattice, written with exact
//! ladder operators in quasi-momentum space, plus the applications built on
//! it: coherent states, planar angular momentum, impurity scattering on a
//! ring, and the many-body ring ground state.

pub mod coherent;
pub mod error;
pub mod manybody;
pub mod model;
pub mod numerics;
pub mod oscillator;
pub mod scattering;

pub use error::{Error, Result};
