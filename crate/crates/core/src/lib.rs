//! Integral cohomology of wreath products `G ≀ C_p`.
//!
//! The brute-force side builds `Hom_{C_p}(W, C^{⊗p})` for a periodic
//! resolution `W` and takes exact Smith normal forms. The predictive side
//! evaluates closed formulas for the same groups, and the spectral module
//! computes both spectral sequences of the double complex page by page.

pub mod arith;
pub mod cli;
pub mod complexes;
pub mod equivariant;
pub mod error;
pub mod exactlin;
pub mod formulas;
pub mod spectral;

pub use error::{Error, Result};
