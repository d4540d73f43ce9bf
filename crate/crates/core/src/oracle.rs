//! Exhaustive enumeration: the exact solver used as ground truth at desk scale.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::cost::ExtendedCost;
use crate::error::{Error, Result};
use crate::instance::{Assignment, Instance};
use crate::relation::{Relation, Var};

/// Default cap on `|D|^|V|`.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

pub fn enumeration_size(domain_size: usize, num_vars: usize) -> u128 {
    let mut size: u128 = 1;
    for _ in 0..num_vars {
        size = size.saturating_mul(domain_size as u128);
    }
    size
}

fn check_budget(instance: &Instance, budget: u64) -> Result<()> {
    let required = enumeration_size(instance.domain().size(), instance.num_vars());
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Streams the satisfying assignments in lexicographic variable-label order.
///
/// Internally a depth-first walk over label prefixes; a constraint is checked
/// as soon as every variable in its scope is assigned, so the walk visits
/// exactly the satisfying assignments plus the falsified prefixes.
pub struct SatisfyingAssignments<'a> {
    num_vars: usize,
    domain_size: usize,
    // Constraints grouped by the largest variable index in their scope.
    groups: Vec<Vec<(&'a Relation, &'a [Var])>>,
    labels: Vec<usize>,
    depth: usize,
    exhausted: bool,
}

impl<'a> SatisfyingAssignments<'a> {
    fn new(instance: &'a Instance) -> Result<Self> {
        let mut groups = vec![Vec::new(); instance.num_vars()];
        for (rel, scope) in instance.resolved()? {
            let last = scope.iter().copied().max().expect("arity is positive");
            groups[last].push((rel, scope));
        }
        Ok(SatisfyingAssignments {
            num_vars: instance.num_vars(),
            domain_size: instance.domain().size(),
            groups,
            labels: vec![0; instance.num_vars()],
            depth: 0,
            exhausted: false,
        })
    }

    fn prefix_ok(&self, depth: usize) -> bool {
        self.groups[depth].iter().all(|(rel, scope)| {
            let projected: Vec<usize> = scope.iter().map(|&v| self.labels[v]).collect();
            rel.contains(&projected)
        })
    }

    /// Backtrack to the deepest position that still has labels to try.
    fn step_back(&mut self) -> bool {
        loop {
            if self.depth == 0 {
                self.exhausted = true;
                return false;
            }
            self.depth -= 1;
            if self.labels[self.depth] + 1 < self.domain_size {
                self.labels[self.depth] += 1;
                return true;
            }
        }
    }
}

impl Iterator for SatisfyingAssignments<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.exhausted {
            return None;
        }
        if self.num_vars == 0 {
            self.exhausted = true;
            return Some(Assignment::new(Vec::new()));
        }
        // After yielding a full assignment, `depth == num_vars`.
        if self.depth == self.num_vars {
            self.depth -= 1;
            if self.labels[self.depth] + 1 < self.domain_size {
                self.labels[self.depth] += 1;
            } else if !self.step_back() {
                return None;
            }
        }
        loop {
            if self.prefix_ok(self.depth) {
                self.depth += 1;
                if self.depth == self.num_vars {
                    return Some(Assignment::new(self.labels.clone()));
                }
                self.labels[self.depth] = 0;
            } else if self.labels[self.depth] + 1 < self.domain_size {
                self.labels[self.depth] += 1;
            } else if !self.step_back() {
                return None;
            }
        }
    }
}

pub fn enumerate_satisfying(instance: &Instance, budget: u64) -> Result<SatisfyingAssignments<'_>> {
    check_budget(instance, budget)?;
    SatisfyingAssignments::new(instance)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOutcome {
    Solved {
        optimum: BigRational,
        witness: Assignment,
    },
    /// No satisfying assignment of finite cost exists.
    Unsat,
}

/// Minimum-cost satisfying assignment by exhaustive search. The witness is
/// the lexicographically first assignment attaining the optimum.
pub fn solve_exact(instance: &Instance, budget: u64) -> Result<ExactOutcome> {
    let mut best: Option<(BigRational, Assignment)> = None;
    for assignment in enumerate_satisfying(instance, budget)? {
        let mut cost = ExtendedCost::zero();
        for (v, &label) in assignment.labels().iter().enumerate() {
            cost = cost + instance.costs.get(v, label);
        }
        let ExtendedCost::Finite(cost) = cost else {
            continue;
        };
        match &best {
            Some((incumbent, _)) if *incumbent <= cost => {}
            _ => best = Some((cost, assignment)),
        }
    }
    Ok(match best {
        Some((optimum, witness)) => ExactOutcome::Solved { optimum, witness },
        None => ExactOutcome::Unsat,
    })
}
