//! Exact fixed-point statistics for finite permutation groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactmath`]: rationals, integer sequences and dense rational polynomials.
//! * [`permcore`]: permutations, groups given by generators, orbits, stabilisers.
//! * [`groupstats`]: fixed-point spectra, cycle counts and cycle indices of groups and cosets.
//! * [`constructions`]: named groups, direct and wreath products, and the group-expression language.
//! * [`formulas`]: closed-form evaluators that work on spectra rather than on groups.
//! * [`density`]: parameterised families and witness searches for derangement proportions.
//!
//! Every proportion is an exact [`BigRational`]; floating point only appears where the
//! quantity itself is transcendental.

pub mod constructions;
pub mod density;
pub mod error;
pub mod exactmath;
pub mod formulas;
pub mod groupstats;
pub mod permcore;

pub use error::{Error, Result};
pub use exactmath::{BigInt, BigRational, BigUint, RationalPoly};
pub use permcore::{Coset, Permutation, PermGroup};

/// Default bound on the number of elements materialised or streamed for one group.
pub const DEFAULT_ENUMERATION_CAP: usize = 2_000_000;

/// Default bound on the number of points of a constructed group.
pub const DEFAULT_DEGREE_CAP: usize = 10_000;

/// Resource limits applied while building and enumerating groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub enumeration_cap: usize,
    pub degree_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

impl Limits {
    pub fn with_enumeration_cap(mut self, cap: usize) -> Self {
        self.enumeration_cap = cap;
        self
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }
}
