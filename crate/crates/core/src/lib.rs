//! Minimum-cost constraint satisfaction over finite domains.
//!
//! The crate is built around instances whose binary constraints are preserved
//! by the dual discriminator (the "0/1/all" languages). For those instances it
//! provides two approximation algorithms with a multiplicative guarantee equal
//! to the domain size: a greedy algorithm driven by derived costs
//! ([`greedy::solve_greedy`]) and a rounding scheme over an exact rational
//! linear relaxation ([`blp::solve_lp_rounding`]). Both consume instances
//! brought to (2,3)-minimal form by [`minimal::make_23_minimal`].
//!
//! Supporting machinery: explicit finite operations and preservation checks
//! ([`poly`]), an exhaustive enumeration oracle ([`oracle`]), and constructive
//! reductions from Min UnCut, hypergraph vertex cover, and nearest-codeword
//! problems ([`reduce`]).
//!
//! All arithmetic is exact: costs, LP coefficients, and derived-cost budgets
//! are arbitrary-precision rationals, so every comparison in the guarantees is
//! tolerance-free.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod blp;
pub mod cost;
pub mod error;
pub mod greedy;
pub mod instance;
pub mod minimal;
pub mod oracle;
pub mod poly;
pub mod reduce;
pub mod relation;
mod rng;
pub mod simplex;

pub use cost::{CostMatrix, ExtendedCost};
pub use error::{Error, Result};
pub use instance::{Assignment, Constraint, Evaluation, Instance};
pub use relation::{ConstraintLanguage, Domain, Label, Relation, Var};

pub type Rational = num_rational::BigRational;
