//! Exact integer linear algebra: Smith and Hermite forms, lattice
//! subquotients and membership.

mod hermite;
mod lattice;
mod matrix;
mod smith;

pub use hermite::{column_hermite, ColumnEchelon};
pub use lattice::{
    homology_of_cyclic_maps, image_basis, invariant_factors, kernel_basis, kernel_of_cyclic_map, mod_p_rank,
    prime_power_parts, same_lattice, solve_in_lattice, subquotient_decomposition, CyclicDecomposition, Subquotient,
};
pub use matrix::IntegerMatrix;
pub use smith::{smith_normal_form, Smith};
