//! Greedy minimum-cost solver with derived-cost charging.
//!
//! The solver walks the undetermined variables, prices each candidate label
//! by the derived cost of everything it would fix, commits the cheapest one,
//! and pays that price down across *all* labels' fixed sets. The bookkeeping
//! keeps the total derived-cost decrease within a factor of `|D|` of the
//! decrease along any satisfying assignment, which yields the approximation
//! guarantee. Every step is recorded in a trace so the accounting identities
//! can be re-verified after the fact.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::cost::{CostMatrix, ExtendedCost};
use crate::error::{Error, Result};
use crate::instance::Assignment;
use crate::minimal::{classify_01all, fixed_set, is_trivial, BinaryInstance};
use crate::relation::{Label, Var};

/// Dense `|V| x |D|` grid of rationals; used for the per-iteration decrease.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalGrid {
    num_vars: usize,
    domain_size: usize,
    entries: Vec<BigRational>,
}

impl RationalGrid {
    pub fn zero(num_vars: usize, domain_size: usize) -> Self {
        RationalGrid {
            num_vars,
            domain_size,
            entries: vec![BigRational::zero(); num_vars * domain_size],
        }
    }

    pub fn get(&self, v: Var, a: Label) -> &BigRational {
        &self.entries[v * self.domain_size + a]
    }

    pub fn set(&mut self, v: Var, a: Label, value: BigRational) {
        self.entries[v * self.domain_size + a] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, Label, &BigRational)> {
        let d = self.domain_size;
        self.entries
            .iter()
            .enumerate()
            .map(move |(i, r)| (i / d, i % d, r))
    }
}

/// One candidate label of the chosen variable: what it fixes, the derived
/// cost of that set, and how the committed price was distributed over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelOption {
    pub label: Label,
    /// Fixed variables and their forced labels, ascending by variable.
    pub fixed: Vec<(Var, Label)>,
    /// Total derived cost over `fixed` when the iteration started.
    pub cost: BigRational,
    /// Non-negative amounts summing to the chosen label's cost, aligned with
    /// `fixed` and bounded by the current derived costs entrywise.
    pub distribution: Vec<BigRational>,
}

/// Record of one while-loop iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace {
    pub variable: Var,
    pub options: Vec<LabelOption>,
    pub chosen: Label,
    /// Entrywise decrease applied to the derived costs this iteration.
    pub delta: RationalGrid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    pub assignment: Assignment,
    pub trace: Vec<IterationTrace>,
}

fn finite_costs(bi: &BinaryInstance) -> Result<()> {
    for v in 0..bi.num_vars() {
        for &a in bi.unary(v) {
            if bi.costs().get(v, a).is_infinite() {
                return Err(Error::Contract(format!(
                    "label {a} of variable {} is feasible but has infinite cost",
                    bi.variables()[v]
                )));
            }
        }
    }
    Ok(())
}

fn ensure_greedy_input(bi: &BinaryInstance) -> Result<()> {
    if is_trivial(bi) {
        return Err(Error::Contract(String::from(
            "instance is trivial (some label set is empty)",
        )));
    }
    if let Err(reason) = bi.check_minimal() {
        return Err(Error::Contract(format!("instance is not (2,3)-minimal: {reason}")));
    }
    for ((u, v), rel) in bi.materialized_pairs() {
        if !classify_01all(&rel.to_relation(bi.domain()))?.is_preserved() {
            return Err(Error::Contract(format!(
                "pair ({}, {}) is not preserved by the dual discriminator",
                bi.variables()[u],
                bi.variables()[v]
            )));
        }
    }
    finite_costs(bi)
}

fn finite(cost: &ExtendedCost) -> BigRational {
    cost.as_finite().expect("checked finite upstream").clone()
}

/// Runs the greedy solver on a nontrivial (2,3)-minimal instance whose pairs
/// the dual discriminator preserves and whose feasible labels all have finite
/// cost. Arbitrary choices are pinned: the lowest-index undetermined variable
/// is processed next and argmin ties go to the lowest label.
pub fn solve_greedy(bi: &BinaryInstance) -> Result<GreedyResult> {
    ensure_greedy_input(bi)?;
    let n = bi.num_vars();
    let d = bi.domain().size();

    let mut derived: CostMatrix = bi.costs().clone();
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut undetermined: BTreeSet<Var> = BTreeSet::new();

    for v in 0..n {
        if bi.unary(v).len() >= 2 {
            undetermined.insert(v);
        } else {
            let a = *bi.unary(v).iter().next().expect("nontrivial instance");
            labels[v] = Some(a);
            derived.set(v, a, ExtendedCost::zero())?;
        }
    }

    let mut trace = Vec::new();
    while let Some(&v) = undetermined.iter().next() {
        // Price every feasible label of v by the derived cost of the
        // variables it fixes (always including v itself).
        let mut options: Vec<LabelOption> = Vec::new();
        for &a in bi.unary(v) {
            let fixed: Vec<(Var, Label)> = fixed_set(bi, v, a)?
                .fixed
                .into_iter()
                .filter(|(u, _)| undetermined.contains(u))
                .collect();
            let cost = fixed
                .iter()
                .map(|&(u, b)| finite(derived.get(u, b)))
                .fold(BigRational::zero(), |acc, x| acc + x);
            options.push(LabelOption {
                label: a,
                fixed,
                cost,
                distribution: Vec::new(),
            });
        }
        let chosen_index = options
            .iter()
            .enumerate()
            .min_by(|(_, x), (_, y)| x.cost.cmp(&y.cost))
            .map(|(i, _)| i)
            .expect("nontrivial instance has feasible labels");
        let price = options[chosen_index].cost.clone();
        let chosen = options[chosen_index].label;

        // Distribute the committed price over each label's fixed set by
        // water-filling in ascending variable order; always possible because
        // each label's total is at least the chosen one's. Take the largest
        // candidate decrease per cell.
        let mut delta = RationalGrid::zero(n, d);
        for option in &mut options {
            let mut remaining = price.clone();
            for &(u, b) in &option.fixed {
                let available = finite(derived.get(u, b));
                let take = if remaining <= available {
                    remaining.clone()
                } else {
                    available
                };
                remaining -= &take;
                if &take > delta.get(u, b) {
                    delta.set(u, b, take.clone());
                }
                option.distribution.push(take);
            }
            debug_assert!(remaining.is_zero());
        }

        for (u, b, dec) in delta.clone().iter() {
            if !dec.is_zero() {
                let updated = finite(derived.get(u, b)) - dec;
                derived.set(u, b, ExtendedCost::Finite(updated))?;
            }
        }

        for &(u, b) in &options[chosen_index].fixed {
            labels[u] = Some(b);
            undetermined.remove(&u);
        }
        trace.push(IterationTrace {
            variable: v,
            options,
            chosen,
            delta,
        });
    }

    let labels = labels
        .into_iter()
        .map(|l| l.expect("loop assigns every variable"))
        .collect();
    let assignment = Assignment::new(labels);
    debug_assert!(bi.satisfied_by(&assignment));
    Ok(GreedyResult { assignment, trace })
}

/// A violated accounting identity found while replaying a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceViolation {
    /// The recorded per-label cost differs from the replayed derived costs.
    OptionCost { iteration: usize, label: Label },
    /// A distribution entry is negative or exceeds the derived cost it draws from.
    DistributionRange { iteration: usize, label: Label },
    /// A label's distribution does not sum to the chosen label's cost.
    DistributionSum { iteration: usize, label: Label },
    /// The recorded decrease is not the maximum distributed amount per cell.
    DeltaMismatch { iteration: usize, var: Var, label: Label },
    /// The chosen label's fixed set keeps a nonzero derived cost.
    ChosenNotExhausted { iteration: usize, var: Var },
    /// Some derived cost became negative (equivalently, decreases exceed it).
    NegativeDerivedCost { iteration: usize, var: Var, label: Label },
    /// A decrease entry is negative, so the derived cost would increase.
    IncreasingStep { iteration: usize, var: Var, label: Label },
    /// Total decrease exceeded the domain-size multiple of the decrease along
    /// the reference assignment.
    ChargingExceeded { iteration: usize },
    /// The final derived cost along the returned assignment is nonzero.
    FinalNonzero { var: Var },
    /// The returned assignment does not satisfy the instance.
    NotSatisfying,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceReport {
    pub violations: Vec<TraceViolation>,
}

impl TraceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Replays a greedy run against the instance it came from and checks the
/// accounting invariants: per-label totals, water-filling ranges, maximal
/// per-cell decreases, monotone non-negative derived costs, a zero final
/// derived cost along the output, and (given a reference satisfying
/// assignment) the per-iteration charging bound.
pub fn check_trace(
    bi: &BinaryInstance,
    result: &GreedyResult,
    reference: Option<&Assignment>,
) -> TraceReport {
    let mut violations = Vec::new();
    let n = bi.num_vars();
    let d = bi.domain().size();
    let ratio = BigRational::from_integer(d.into());

    let mut derived: Vec<Option<BigRational>> = (0..n * d)
        .map(|i| bi.costs().get(i / d, i % d).as_finite().cloned())
        .collect();
    for v in 0..n {
        if bi.unary(v).len() == 1 {
            let a = *bi.unary(v).iter().next().expect("singleton");
            derived[v * d + a] = Some(BigRational::zero());
        }
    }

    for (it, step) in result.trace.iter().enumerate() {
        let price = step
            .options
            .iter()
            .find(|o| o.label == step.chosen)
            .map(|o| o.cost.clone())
            .unwrap_or_else(BigRational::zero);
        let mut expected_delta = RationalGrid::zero(n, d);
        for option in &step.options {
            let recomputed = option
                .fixed
                .iter()
                .filter_map(|&(u, b)| derived[u * d + b].clone())
                .fold(BigRational::zero(), |acc, x| acc + x);
            if recomputed != option.cost {
                violations.push(TraceViolation::OptionCost {
                    iteration: it,
                    label: option.label,
                });
            }
            let mut sum = BigRational::zero();
            for (&(u, b), amount) in option.fixed.iter().zip(option.distribution.iter()) {
                let available = derived[u * d + b].clone().unwrap_or_else(BigRational::zero);
                if amount < &BigRational::zero() || amount > &available {
                    violations.push(TraceViolation::DistributionRange {
                        iteration: it,
                        label: option.label,
                    });
                }
                sum += amount;
                if amount > expected_delta.get(u, b) {
                    expected_delta.set(u, b, amount.clone());
                }
            }
            if sum != price || option.distribution.len() != option.fixed.len() {
                violations.push(TraceViolation::DistributionSum {
                    iteration: it,
                    label: option.label,
                });
            }
        }

        for (v, a, dec) in step.delta.iter() {
            if dec < &BigRational::zero() {
                violations.push(TraceViolation::IncreasingStep {
                    iteration: it,
                    var: v,
                    label: a,
                });
            }
            if dec != expected_delta.get(v, a) {
                violations.push(TraceViolation::DeltaMismatch {
                    iteration: it,
                    var: v,
                    label: a,
                });
            }
        }

        // Apply the recorded decrease.
        let mut total_decrease = BigRational::zero();
        for (v, a, dec) in step.delta.iter() {
            if dec.is_zero() {
                continue;
            }
            total_decrease += dec;
            match &mut derived[v * d + a] {
                Some(t) => {
                    *t -= dec;
                    if *t < BigRational::zero() {
                        violations.push(TraceViolation::NegativeDerivedCost {
                            iteration: it,
                            var: v,
                            label: a,
                        });
                    }
                }
                None => violations.push(TraceViolation::NegativeDerivedCost {
                    iteration: it,
                    var: v,
                    label: a,
                }),
            }
        }

        if let Some(option) = step.options.iter().find(|o| o.label == step.chosen) {
            for &(u, b) in &option.fixed {
                if derived[u * d + b] != Some(BigRational::zero()) {
                    violations.push(TraceViolation::ChosenNotExhausted { iteration: it, var: u });
                }
            }
        }

        if let Some(reference) = reference {
            let along_reference = (0..n)
                .map(|v| step.delta.get(v, reference.label(v)).clone())
                .fold(BigRational::zero(), |acc, x| acc + x);
            if total_decrease > &ratio * &along_reference {
                violations.push(TraceViolation::ChargingExceeded { iteration: it });
            }
        }
    }

    for (v, &a) in result.assignment.labels().iter().enumerate() {
        if derived[v * d + a] != Some(BigRational::zero()) {
            violations.push(TraceViolation::FinalNonzero { var: v });
        }
    }
    if !bi.satisfied_by(&result.assignment) {
        violations.push(TraceViolation::NotSatisfying);
    }

    TraceReport { violations }
}
