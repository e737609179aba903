//! Operator-algebra toolkit for the integrable trotterization of the critical
//! transverse-field Ising chain.
//!
//! The crate builds R-operators, inhomogeneous transfer matrices, trotterized
//! and Floquet circuits, Kramers–Wannier duality operators and conserved
//! charges on small chains, and checks the identities relating them to
//! floating-point tolerance.

pub mod charges;
pub mod circuits;
pub mod cli;
pub mod duality;
pub mod error;
pub mod fermion;
pub mod lax;
pub mod linalg;
pub mod pauli;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
pub use linalg::DenseOperator;
pub use pauli::{Pauli, PauliSum, PauliTerm};
pub use report::CheckReport;
