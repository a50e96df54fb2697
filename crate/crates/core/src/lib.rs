//! Exact corner statistics for permutation tableaux and tree-like tableaux.
//!
//! The crate covers exhaustive enumeration of both families, the bivariate
//! generating function of permutation tableaux by corners and unrestricted
//! rows, exact moments of the corner count together with diagnostics of its
//! convergence to the normal law, an exactly uniform sampler, and the map
//! from tree-like tableaux to exclusion-process states.

pub mod enumerate;
pub mod error;
pub mod genfun;
pub mod moments;
pub mod pasep;
pub mod poly;
pub mod rational;
pub mod sampler;
pub mod shape;
pub mod tableau;
pub mod verify;

pub use error::{Error, Result};
