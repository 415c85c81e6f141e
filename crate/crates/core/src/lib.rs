//! Majorana spinors from electromagnetic data: Clifford algebra utilities,
//! Taylor-jet fields, recovery of a real spinor from its vector current and
//! the four-potential, and a finite-difference Cauchy evolution of the
//! resulting third-order system.

pub mod cauchy;
pub mod clifford;
pub mod error;
pub mod fields;
pub mod jet;
pub mod lattice;
pub mod phase_recovery;
pub mod spinor_ops;
pub mod worked_example;

pub use error::{Error, Result};
