//! Exact computation of the essential p-dimension of groups of
//! multiplicative type, working entirely with character-module data:
//! a finite p-group given by its Cayley table acting on a finitely
//! presented abelian group.
//!
//! The pipeline is
//!
//! * [`exactlin`]: Smith normal form, integer kernels, lattice membership
//!   and subspaces of `F_p^n`;
//! * [`pgroup`]: Cayley-table p-groups and their subgroup classes;
//! * [`gmodule`]: character modules, `X / (pX + IX)` and fixed lattices;
//! * [`presentation`]: permutation modules mapping onto a character module;
//! * [`solver`]: the minimal presentation search, its brute-force oracle
//!   and the bound calculators;
//! * [`constructions`]: builders for standard and random instances.

pub mod constructions;
pub mod error;
pub mod exactlin;
pub mod gmodule;
pub mod pgroup;
pub mod presentation;
pub mod solver;

pub use error::{Error, ErrorKind, Result};
pub use exactlin::{FpSubspace, IntMatrix, SmithDecomposition};
pub use gmodule::{CobarSpace, GModule, ModuleStructure};
pub use pgroup::{FiniteGroup, Subgroup, SubgroupClassTable};
pub use presentation::{KernelReport, PermutationModule, PresentationMap};
pub use solver::{BoundsResult, CostTable, EdResult};
