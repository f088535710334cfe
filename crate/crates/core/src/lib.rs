//! Finite-group engine for subgroup lattices and Dedekind-closeness ratios.
//!
//! Groups are materialized as multiplication tables ([`FiniteGroup`]). On top
//! of that the crate enumerates complete subgroup lattices with their
//! conjugacy classes ([`lattice`]), computes the ratio of conjugacy classes
//! of subgroups to subgroups and its minimum over sections ([`invariants`]),
//! and cross-checks both against closed forms ([`formulas`]) and
//! consistency suites ([`verify`]).

pub mod arith;
pub mod bitset;
pub mod error;
pub mod families;
pub mod formulas;
pub mod group;
pub mod invariants;
pub mod iso;
pub mod lattice;
pub mod perm;
pub mod rational;
pub mod spec;
pub mod verify;

pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupFingerprint, Homomorphism, Subgroup};
pub use lattice::SubgroupLattice;
pub use perm::Perm;
pub use rational::Rational;
pub use spec::GroupSpec;

/// Size limits shared by constructors and enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_order: usize,
    pub iso_cap: usize,
    pub lattice_budget: usize,
    /// Permits d* on groups above [`invariants::DSTAR_SLOW_ORDER`].
    pub allow_slow: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: group::DEFAULT_MAX_ORDER,
            iso_cap: iso::DEFAULT_ISO_CAP,
            lattice_budget: lattice::DEFAULT_LATTICE_BUDGET,
            allow_slow: false,
        }
    }
}

/// Version stamp for persisted results.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
