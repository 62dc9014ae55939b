//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, generator has {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("degree must be at least 1")]
    ZeroDegree,

    #[error("not a permutation: {0}")]
    BadPermutation(String),

    #[error("{what} budget exceeded: group order {order} > limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        order: u64,
        limit: u64,
    },

    #[error("group is not transitive")]
    Intransitive,

    #[error("partition is not invariant under generator {gen}")]
    NotInvariant { gen: usize },

    #[error("ambient group has degree {ambient}, operands have degree {degree}")]
    AmbientDegreeMismatch { ambient: usize, degree: usize },

    #[error("no catalogue available for degree {0}")]
    MissingCatalogue(usize),

    #[error("module dimension {dim} exceeds bound {bound}")]
    DimensionBound { dim: usize, bound: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("inconsistent cocycle system for split extension (internal error)")]
    InconsistentCocycle,

    #[error("orbital count {0} exceeds subset-enumeration guard (30)")]
    TooManyOrbitals(usize),

    #[error("automorphism search guard: group order {0} exceeds 100")]
    AutGuard(u64),

    #[error("seed data invalid: {0}")]
    SeedValidation(String),

    #[error("unsupported part at degree {degree}: {part} ({reason})")]
    UnsupportedPart {
        degree: usize,
        part: String,
        reason: String,
    },

    #[error("missing CI verdict for group ({order},{index})")]
    MissingVerdict { order: u64, index: usize },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("cannot break canonical-order tie between non-conjugate groups of order {0}")]
    CanonicalTie(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
