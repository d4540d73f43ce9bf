//! Minimum-cost CSP instances and assignment evaluation.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::{CostMatrix, ExtendedCost};
use crate::error::{Error, Result};
use crate::relation::{Domain, Label, Relation, Var};

/// One constraint: a relation name applied to a tuple of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub relation: String,
    pub scope: Vec<Var>,
}

/// An instance: ordered variables, relation-scoped constraints, and a cost
/// per (variable, label) pair. A solution is a satisfying assignment of
/// minimum total cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub language: crate::relation::ConstraintLanguage,
    pub variables: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub costs: CostMatrix,
}

impl Instance {
    pub fn new(
        language: crate::relation::ConstraintLanguage,
        variables: Vec<String>,
        constraints: Vec<Constraint>,
        costs: CostMatrix,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for name in &variables {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateVariable(name.clone()));
            }
        }
        if costs.num_vars() != variables.len() || costs.domain_size() != language.domain().size() {
            return Err(Error::Contract(String::from(
                "cost matrix dimensions do not match the instance",
            )));
        }
        let inst = Instance {
            language,
            variables,
            constraints,
            costs,
        };
        inst.resolved()?;
        Ok(inst)
    }

    pub fn domain(&self) -> Domain {
        self.language.domain()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Looks up every constraint's relation and validates its scope.
    pub(crate) fn resolved(&self) -> Result<Vec<(&Relation, &[Var])>> {
        let mut out = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            let rel = self
                .language
                .get(&c.relation)
                .ok_or_else(|| Error::UnknownRelation(c.relation.clone()))?;
            if c.scope.len() != rel.arity() {
                return Err(Error::ScopeMismatch {
                    relation: c.relation.clone(),
                    expected: rel.arity(),
                    found: c.scope.len(),
                });
            }
            for &v in &c.scope {
                if v >= self.variables.len() {
                    return Err(Error::UnknownVariable {
                        var: v,
                        num_vars: self.variables.len(),
                    });
                }
            }
            out.push((rel, c.scope.as_slice()));
        }
        Ok(out)
    }

    /// Checks every constraint and sums the per-variable costs (infinity
    /// absorbs). The two results are independent: an assignment can satisfy
    /// all constraints yet have infinite cost.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Evaluation> {
        if assignment.len() != self.num_vars() {
            return Err(Error::AssignmentSize {
                expected: self.num_vars(),
                found: assignment.len(),
            });
        }
        for &label in assignment.labels() {
            if label >= self.domain().size() {
                return Err(Error::LabelOutOfRange {
                    label,
                    domain_size: self.domain().size(),
                });
            }
        }
        let mut satisfying = true;
        for (rel, scope) in self.resolved()? {
            let projected: Vec<Label> = scope.iter().map(|&v| assignment.label(v)).collect();
            if !rel.contains(&projected) {
                satisfying = false;
                break;
            }
        }
        let mut cost = ExtendedCost::zero();
        for (v, &label) in assignment.labels().iter().enumerate() {
            cost = cost + self.costs.get(v, label);
        }
        Ok(Evaluation { satisfying, cost })
    }
}

/// A total assignment, indexed by variable position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    labels: Vec<Label>,
}

impl Assignment {
    pub fn new(labels: Vec<Label>) -> Self {
        Assignment { labels }
    }

    pub fn label(&self, var: Var) -> Label {
        self.labels[var]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub satisfying: bool,
    pub cost: ExtendedCost,
}
