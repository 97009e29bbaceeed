use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Group-table axiom that failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupAxiom {
    Shape,
    EntryRange,
    Identity,
    Inverses,
    Associativity,
}

impl std::fmt::Display for GroupAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GroupAxiom::Shape => "table is not square",
            GroupAxiom::EntryRange => "entry out of range",
            GroupAxiom::Identity => "element 0 is not a two-sided identity",
            GroupAxiom::Inverses => "missing two-sided inverse",
            GroupAxiom::Associativity => "multiplication is not associative",
        };
        f.write_str(s)
    }
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Limit,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("not a group: {axiom} ({detail})")]
    NotAGroup { axiom: GroupAxiom, detail: String },
    #[error("group order {order} is not a power of {p}")]
    NotAPGroup { p: u64, order: usize },
    #[error("element id {id} out of range for a group of order {order}")]
    BadElement { id: usize, order: usize },
    #[error("element set is not a subgroup of the acting group")]
    NotASubgroup,
    #[error("group of order {order} exceeds the subgroup enumeration ceiling {ceiling}")]
    GroupTooLarge { order: usize, ceiling: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("action of element {element} does not preserve the relation lattice")]
    ActionNotStable { element: usize },
    #[error("action of element {element} is not an automorphism of the module")]
    NotAnAutomorphism { element: usize },
    #[error("actions are not a homomorphism: A_{g} A_{h} != A_{{{g}*{h}}}")]
    NotAHomomorphism { g: usize, h: usize },
    #[error("prime mismatch: expected {expected}, found {found}")]
    PrimeMismatch { expected: u64, found: u64 },
    #[error("modules are defined over different acting groups")]
    GroupMismatch,
    #[error("quotient space does not belong to this module")]
    CobarMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("image of summand {summand} is not fixed by its stabilizer")]
    ImageNotFixed { summand: usize },
    #[error("map is not a p-presentation")]
    NotAPPresentation,
    #[error("kernel is not fixed pointwise by the acting group")]
    KernelNotTrivialModule,
    #[error("subspaces do not span the target")]
    Infeasible,
    #[error("instance outside the exhaustive-search box: {0}")]
    InstanceTooLarge(String),
    #[error("no spanning choice with total index at most {ceiling}")]
    CeilingTooLow { ceiling: usize },
    #[error("module has torsion; a torus character lattice is required")]
    TorsionPresent,
    #[error("bound inputs out of order: {0}")]
    BoundOrder(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::GroupTooLarge { .. }
            | Error::Infeasible
            | Error::InstanceTooLarge(_)
            | Error::CeilingTooLow { .. } => ErrorKind::Limit,
            _ => ErrorKind::Validation,
        }
    }
}
