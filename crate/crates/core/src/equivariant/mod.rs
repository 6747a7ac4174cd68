//! C_p-equivariant constructions: cyclic tensor powers, the periodic
//! resolution, the Hom double complex and its totalization.

mod action;
mod double;
mod resolution;
mod wreath;

pub use action::{cyclic_power, EquivariantComplex, FactorTuple, SignedPermutation};
pub use double::{equivariant_hom_double_complex, totalize, Block, DoubleComplex, TotalComplex};
pub use resolution::{cp_cohomology, periodic_resolution, GroupRingElement, Resolution};
pub use wreath::{bruteforce_cyclic, bruteforce_graded, WreathModel};
