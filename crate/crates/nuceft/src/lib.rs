//! Resource estimation for lattice nuclear effective field theory simulations:
//! Pauli algebra, fermionic reference arithmetic, encodings, model builders,
//! Trotter and truncation bounds, and circuit cost models.

pub mod cli;
pub mod costs;
pub mod encodings;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod models;
pub mod pauli;
pub mod task;
pub mod trotter;
pub mod trunc;
pub mod verify;

pub use error::{Error, Result};
