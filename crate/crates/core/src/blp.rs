//! The basic linear relaxation and its threshold rounding.
//!
//! The relaxation keeps one distribution over satisfying tuples per
//! constraint and forces consistent per-variable marginals; its objective is
//! the expected cost. Rounding keeps exactly the labels whose marginal is at
//! least `1/|D|` (an exact rational comparison), intersects the pair
//! relations accordingly, and reads a satisfying assignment off the result,
//! which provably stays nontrivial and (2,3)-minimal.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::cost::ExtendedCost;
use crate::error::{Error, Result};
use crate::instance::{Assignment, Instance};
use crate::minimal::{classify_01all, is_trivial, solve_23minimal, BinaryInstance};
use crate::relation::{BinaryRel, Label, Var};
use crate::simplex::{self, SimplexOutcome, StandardLp};

/// An LP column: a variable-label marginal or a constraint-tuple weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpVarName {
    Marginal { var: Var, label: Label },
    TupleWeight { constraint: usize, tuple: usize },
}

/// The relaxation in solver-ready form, plus the name map used to read
/// marginals back out.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub names: Vec<LpVarName>,
    pub lp: StandardLp,
    pub marginal_index: BTreeMap<(Var, Label), usize>,
    /// For each tuple-weight column: the constraint's scope and the tuple it
    /// stands for, aligned positionwise.
    pub tuple_columns: BTreeMap<usize, (Vec<Var>, Vec<Label>)>,
    /// Set when some constraint has an empty relation; the relaxation is then
    /// infeasible without running the solver.
    pub infeasible_marker: bool,
    /// Row counts by kind: (per-variable, per-constraint, marginal-consistency).
    pub row_counts: (usize, usize, usize),
}

impl LpProblem {
    /// The 0/1 point of a total assignment: unit mass on each chosen label
    /// and on each constraint's projected tuple. Feasible whenever the
    /// assignment satisfies the instance the relaxation came from, with
    /// objective equal to the assignment's cost.
    pub fn indicator_point(&self, assignment: &Assignment) -> Vec<BigRational> {
        let one = BigRational::from_integer(1.into());
        self.names
            .iter()
            .enumerate()
            .map(|(index, name)| match name {
                LpVarName::Marginal { var, label } => {
                    if assignment.label(*var) == *label {
                        one.clone()
                    } else {
                        BigRational::zero()
                    }
                }
                LpVarName::TupleWeight { .. } => {
                    let (scope, tuple) = &self.tuple_columns[&index];
                    let matches = scope
                        .iter()
                        .zip(tuple.iter())
                        .all(|(&v, &a)| assignment.label(v) == a);
                    if matches {
                        one.clone()
                    } else {
                        BigRational::zero()
                    }
                }
            })
            .collect()
    }

    pub fn is_feasible(&self, point: &[BigRational]) -> bool {
        point.len() == self.lp.num_vars
            && point.iter().all(|x| x >= &BigRational::zero())
            && self.lp.rows.iter().all(|(coeffs, rhs)| {
                let lhs = coeffs
                    .iter()
                    .map(|(j, c)| c * &point[*j])
                    .fold(BigRational::zero(), |acc, t| acc + t);
                &lhs == rhs
            })
    }

    pub fn objective_of(&self, point: &[BigRational]) -> BigRational {
        self.lp
            .objective
            .iter()
            .zip(point.iter())
            .map(|(c, x)| c * x)
            .fold(BigRational::zero(), |acc, t| acc + t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: BigRational,
    pub point: Vec<BigRational>,
    pub basis: Vec<usize>,
    pub kept_rows: Vec<usize>,
}

struct Builder {
    names: Vec<LpVarName>,
    objective: Vec<BigRational>,
    rows: Vec<(Vec<(usize, BigRational)>, BigRational)>,
    marginal_index: BTreeMap<(Var, Label), usize>,
    tuple_columns: BTreeMap<usize, (Vec<Var>, Vec<Label>)>,
    infeasible_marker: bool,
    row_counts: (usize, usize, usize),
}

impl Builder {
    fn new() -> Self {
        Builder {
            names: Vec::new(),
            objective: Vec::new(),
            rows: Vec::new(),
            marginal_index: BTreeMap::new(),
            tuple_columns: BTreeMap::new(),
            infeasible_marker: false,
            row_counts: (0, 0, 0),
        }
    }

    fn add_marginal(&mut self, var: Var, label: Label, cost: BigRational) -> usize {
        let index = self.names.len();
        self.names.push(LpVarName::Marginal { var, label });
        self.objective.push(cost);
        self.marginal_index.insert((var, label), index);
        index
    }

    fn add_tuple(&mut self, constraint: usize, tuple: usize) -> usize {
        let index = self.names.len();
        self.names.push(LpVarName::TupleWeight { constraint, tuple });
        self.objective.push(BigRational::zero());
        index
    }

    fn one() -> BigRational {
        BigRational::from_integer(1.into())
    }

    /// Adds the three row families for one constraint given its tuple list
    /// and the (variable, positions) pairs of its scope.
    fn add_constraint_rows(
        &mut self,
        constraint: usize,
        flat_scope: &[Var],
        tuples: &[Vec<Label>],
        scope_vars: &[(Var, Vec<usize>)],
        label_range: impl Fn(Var) -> Vec<Label>,
    ) {
        if tuples.is_empty() {
            self.infeasible_marker = true;
        }
        let tuple_vars: Vec<usize> = (0..tuples.len())
            .map(|t| {
                let index = self.add_tuple(constraint, t);
                self.tuple_columns
                    .insert(index, (flat_scope.to_vec(), tuples[t].clone()));
                index
            })
            .collect();
        self.rows.push((
            tuple_vars.iter().map(|&j| (j, Self::one())).collect(),
            Self::one(),
        ));
        self.row_counts.1 += 1;
        for (var, positions) in scope_vars {
            for label in label_range(*var) {
                let mut coeffs: Vec<(usize, BigRational)> = tuples
                    .iter()
                    .enumerate()
                    .filter(|(_, tuple)| positions.iter().all(|&p| tuple[p] == label))
                    .map(|(t, _)| (tuple_vars[t], Self::one()))
                    .collect();
                let marginal = self.marginal_index[&(*var, label)];
                coeffs.push((marginal, -Self::one()));
                self.rows.push((coeffs, BigRational::zero()));
                self.row_counts.2 += 1;
            }
        }
    }

    fn finish(self) -> LpProblem {
        let num_vars = self.names.len();
        LpProblem {
            names: self.names,
            lp: StandardLp {
                num_vars,
                objective: self.objective,
                rows: self.rows,
            },
            marginal_index: self.marginal_index,
            tuple_columns: self.tuple_columns,
            infeasible_marker: self.infeasible_marker,
            row_counts: self.row_counts,
        }
    }
}

/// Relaxation of a plain instance: every label of every variable gets a
/// marginal, every constraint a tuple distribution. All costs must be finite;
/// price labels out through unary sets before building.
pub fn build_blp(instance: &Instance) -> Result<LpProblem> {
    let d = instance.domain().size();
    let mut builder = Builder::new();
    for v in 0..instance.num_vars() {
        for a in 0..d {
            let cost = instance
                .costs
                .get(v, a)
                .as_finite()
                .ok_or_else(|| {
                    Error::Contract(format!(
                        "infinite cost on ({}, {a}); prune infinite labels before relaxing",
                        instance.variables[v]
                    ))
                })?
                .clone();
            builder.add_marginal(v, a, cost);
        }
    }
    for v in 0..instance.num_vars() {
        let coeffs = (0..d)
            .map(|a| (builder.marginal_index[&(v, a)], Builder::one()))
            .collect();
        builder.rows.push((coeffs, Builder::one()));
        builder.row_counts.0 += 1;
    }
    for (index, (rel, scope)) in instance.resolved()?.iter().enumerate() {
        // Group positions by variable so repeated scopes marginalize jointly.
        let mut by_var: BTreeMap<Var, Vec<usize>> = BTreeMap::new();
        for (pos, &v) in scope.iter().enumerate() {
            by_var.entry(v).or_default().push(pos);
        }
        let scope_vars: Vec<(Var, Vec<usize>)> = by_var.into_iter().collect();
        builder.add_constraint_rows(index, scope, rel.tuples(), &scope_vars, |_| (0..d).collect());
    }
    Ok(builder.finish())
}

/// Relaxation of a binary instance. Marginals exist only for feasible labels
/// (so the unary sets are enforced structurally) and only pairs that restrict
/// beyond a product of the unary sets contribute tuple distributions; product
/// pairs constrain no marginal.
pub fn build_blp_binary(bi: &BinaryInstance) -> Result<LpProblem> {
    let mut builder = Builder::new();
    for v in 0..bi.num_vars() {
        if bi.unary(v).is_empty() {
            builder.infeasible_marker = true;
        }
        for &a in bi.unary(v) {
            let cost = bi
                .costs()
                .get(v, a)
                .as_finite()
                .ok_or_else(|| {
                    Error::Contract(format!(
                        "infinite cost on feasible label ({}, {a})",
                        bi.variables()[v]
                    ))
                })?
                .clone();
            builder.add_marginal(v, a, cost);
        }
    }
    for v in 0..bi.num_vars() {
        let coeffs = bi
            .unary(v)
            .iter()
            .map(|&a| (builder.marginal_index[&(v, a)], Builder::one()))
            .collect();
        builder.rows.push((coeffs, Builder::one()));
        builder.row_counts.0 += 1;
    }
    let mut index = 0;
    for ((u, v), rel) in bi.materialized_pairs() {
        if rel == &BinaryRel::product(bi.unary(u), bi.unary(v), bi.domain().size()) {
            continue;
        }
        let tuples: Vec<Vec<Label>> = rel.iter().map(|(a, b)| alloc::vec![a, b]).collect();
        let scope_vars = alloc::vec![(u, alloc::vec![0]), (v, alloc::vec![1])];
        builder.add_constraint_rows(index, &[u, v], &tuples, &scope_vars, |w| {
            bi.unary(w).iter().copied().collect()
        });
        index += 1;
    }
    Ok(builder.finish())
}

/// Exact optimum of the relaxation.
pub fn lp_solve(problem: &LpProblem) -> LpSolution {
    if problem.infeasible_marker {
        return LpSolution {
            status: LpStatus::Infeasible,
            value: BigRational::zero(),
            point: Vec::new(),
            basis: Vec::new(),
            kept_rows: Vec::new(),
        };
    }
    match simplex::solve(&problem.lp) {
        SimplexOutcome::Optimal {
            point,
            value,
            basis,
            kept_rows,
        } => LpSolution {
            status: LpStatus::Optimal,
            value,
            point,
            basis,
            kept_rows,
        },
        SimplexOutcome::Infeasible => LpSolution {
            status: LpStatus::Infeasible,
            value: BigRational::zero(),
            point: Vec::new(),
            basis: Vec::new(),
            kept_rows: Vec::new(),
        },
        SimplexOutcome::Unbounded => LpSolution {
            status: LpStatus::Unbounded,
            value: BigRational::zero(),
            point: Vec::new(),
            basis: Vec::new(),
            kept_rows: Vec::new(),
        },
    }
}

/// Re-certifies an optimal solution against the problem data.
pub fn verify_optimality(problem: &LpProblem, solution: &LpSolution) -> bool {
    solution.status == LpStatus::Optimal
        && simplex::verify_optimal(
            &problem.lp,
            &solution.point,
            &solution.value,
            &solution.basis,
            &solution.kept_rows,
        )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRounding {
    pub assignment: Assignment,
    pub lp_value: BigRational,
    /// The instance after label pruning; always nontrivial and (2,3)-minimal.
    pub rounded: BinaryInstance,
}

/// Threshold rounding: solve the relaxation, keep labels with marginal at
/// least `1/|D|`, intersect pairs, and extract an assignment. The pruned
/// instance is re-checked to be nontrivial, (2,3)-minimal, and preserved by
/// the dual discriminator; any failure is an internal invariant error.
pub fn solve_lp_rounding(bi: &BinaryInstance) -> Result<LpRounding> {
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

    let problem = build_blp_binary(bi)?;
    let solution = lp_solve(&problem);
    if solution.status != LpStatus::Optimal {
        return Err(Error::Invariant(String::from(
            "relaxation of a nontrivial (2,3)-minimal instance must be solvable",
        )));
    }

    let d = bi.domain().size();
    let threshold = BigRational::new(1.into(), (d as i64).into());
    let mut rounded = bi.clone();
    for v in 0..bi.num_vars() {
        let kept: alloc::collections::BTreeSet<Label> = bi
            .unary(v)
            .iter()
            .copied()
            .filter(|&a| solution.point[problem.marginal_index[&(v, a)]] >= threshold)
            .collect();
        if kept.is_empty() {
            return Err(Error::Invariant(format!(
                "rounding emptied the label set of {}",
                bi.variables()[v]
            )));
        }
        rounded.set_unary(v, kept);
    }
    for u in 0..bi.num_vars() {
        for v in u + 1..bi.num_vars() {
            let mut rel = bi.pair(u, v);
            let product = BinaryRel::product(rounded.unary(u), rounded.unary(v), d);
            rel.intersect(&product);
            rounded.set_pair(u, v, rel);
        }
    }
    if let Err(reason) = rounded.check_minimal() {
        return Err(Error::Invariant(format!(
            "rounded instance lost (2,3)-minimality: {reason}"
        )));
    }
    for ((u, v), rel) in rounded.materialized_pairs() {
        if !classify_01all(&rel.to_relation(bi.domain()))?.is_preserved() {
            return Err(Error::Invariant(format!(
                "rounded pair ({u}, {v}) escaped the dual discriminator shapes"
            )));
        }
    }

    let assignment = solve_23minimal(&rounded)?;
    Ok(LpRounding {
        assignment,
        lp_value: solution.value,
        rounded,
    })
}

/// Feasibility of the indicator point of a satisfying assignment; its
/// objective equals the assignment's cost, which is what makes the relaxation
/// a lower bound on the optimum.
pub fn indicator_objective(bi: &BinaryInstance, assignment: &Assignment) -> Result<BigRational> {
    if !bi.satisfied_by(assignment) {
        return Err(Error::Contract(String::from(
            "indicator points exist only for satisfying assignments",
        )));
    }
    let mut total = BigRational::zero();
    for (v, &a) in assignment.labels().iter().enumerate() {
        match bi.costs().get(v, a) {
            ExtendedCost::Finite(r) => total += r,
            ExtendedCost::Infinite => {
                return Err(Error::Contract(String::from(
                    "satisfying assignment crosses an infinite cost",
                )))
            }
        }
    }
    Ok(total)
}
