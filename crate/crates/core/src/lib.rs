//! Catalogues of transitive permutation groups of small degree.
//!
//! The library classifies the transitive subgroups of `Sym(n)` up to
//! conjugacy for small `n` using two independent engines (subgroup-lattice
//! descent and elementary-abelian layer peeling), cross-checks them, and
//! derives the downstream reports: vertex-transitive graph censuses,
//! elusive-group scans and CI-group verdicts.
//!
//! Start with [`group::PermGroup`] and [`classify::classify_degree`], or run
//! the `permcat` binary. Each major capability has a runnable example under
//! `examples/`.

pub mod error;
pub mod perm;
pub mod group;
pub mod blocks;
pub mod conj;
pub mod canon;
pub mod lattice;
pub mod layer;

pub use error::{Error, Result};
pub use group::PermGroup;
pub use perm::Perm;
