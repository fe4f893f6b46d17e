//! Simulation and verification of a non-abelian geometric quantum memory.
//!
//! A quantized probe field is stored in, and retrieved from, two meta-stable
//! collective modes of an atomic ensemble by adiabatically steering control
//! fields. Each fixed-excitation sector carries a degenerate dark manifold;
//! slow cyclic control loops act on it through a non-abelian holonomy, which
//! this crate computes four independent ways (analytic connection, numeric
//! connection, time-ordered integration, closed form) and checks against
//! exact Schrödinger evolution and a brute-force finite-atom-number model.

pub mod darkspace;
pub mod error;
pub mod fock;
pub mod holonomy;
pub mod linalg;
pub mod model;

pub use error::{Error, Result};
