//! Exact linear algebra over `Z` and over prime fields.

mod fp;
mod matrix;
mod smith;

pub(crate) use fp::check_prime;
pub use fp::{fp_rank, fp_solve, fp_span, is_prime, min_cost_spanning_tower, FpSubspace, SpanningTower};
pub use matrix::{content, is_zero_vec, reduce_mod, vec_from_i64, IntMatrix};
pub use smith::{
    integer_kernel, lattice_basis, rank, smith_normal_form, unimodular_inverse, LatticeSolver, SmithDecomposition,
};
