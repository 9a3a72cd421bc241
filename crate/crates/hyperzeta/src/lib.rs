//! Zeta functions of hyperelliptic curves y^2 = Q(x) over a fixed odd
//! finite field, and the fluctuation statistics of their zero angles across
//! the family of monic squarefree Q of degree 2g+2.
//!
//! The crate computes L(u, chi_Q) by three mutually checking routes,
//! extracts inverse-zero angles, builds Beurling-Selberg smoothing pairs,
//! enforces the explicit formula as an identity, and drives seeded,
//! reproducible Monte-Carlo sweeps over the family together with a matched
//! unitary-symplectic baseline.

pub mod budget;
pub mod bspoly;
pub mod charsym;
pub mod dd;
pub mod ensemble;
pub mod error;
pub mod explicit;
pub mod ffpoly;
pub mod fixtures;
pub mod lfunction;
pub mod numutil;
pub mod rmt;
pub mod zerostats;

pub use budget::Budget;
pub use error::{Error, Result};
