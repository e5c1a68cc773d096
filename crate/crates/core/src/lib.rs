//! Exact differential algebra for Galoisian irreducibility certificates.
//!
//! The crate builds variational equations of second-order ODEs along
//! particular solutions, computes the Lie algebras of their system
//! matrices, and decides the reduced-form obstruction through exact
//! rational-solution tests. Every verdict is backed by a [`verdict::Certificate`]
//! whose evidence can be replayed independently.

pub mod error;
pub mod exactalg;
pub mod galois_screen;
pub mod jets;
pub mod liealg;
pub mod linops;
pub mod ratsolve;
pub mod verdict;

pub use error::{Error, Result};
