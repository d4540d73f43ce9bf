//! Crate-wide error type.

use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain must contain at least one label")]
    EmptyDomain,
    #[error("label {label} out of range for domain of size {domain_size}")]
    LabelOutOfRange { label: usize, domain_size: usize },
    #[error("tuple has length {found}, expected arity {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("negative cost for variable {var}, label {label}")]
    NegativeCost { var: usize, label: usize },
    #[error("objects live over different domains ({left} vs {right} labels)")]
    DomainMismatch { left: usize, right: usize },
    #[error("duplicate relation name `{0}`")]
    DuplicateRelation(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("variable index {var} out of range ({num_vars} variables)")]
    UnknownVariable { var: usize, num_vars: usize },
    #[error("scope of a `{relation}` constraint has {found} variables, relation arity is {expected}")]
    ScopeMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("assignment covers {found} variables, instance has {expected}")]
    AssignmentSize { expected: usize, found: usize },
    #[error("search space of {required} exceeds budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("relation `{0}` is not 2-decomposable")]
    NotTwoDecomposable(String),
    #[error("{0}")]
    ParamOutOfRange(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("label {label} is not feasible for variable {var}")]
    LabelNotFeasible { var: usize, label: usize },
    #[error("edge {index} is a self-loop on vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("hyperedge {index} has {found} vertices, expected {expected}")]
    NonUniformHyperedge {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no gadget provided for relation `{0}`")]
    MissingGadget(String),
    #[error("gadget body uses equality but the source language has no equality relation")]
    EqualityUnavailable,
    #[error("language is missing the permutation relation of {0:?}")]
    MissingPermutation(Vec<usize>),
}
