//! Binary working form: 2-decomposition, the (2,3)-minimality fixpoint, the
//! product/two-fan/bijection classifier, and assignment extraction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::CostMatrix;
use crate::error::{Error, Result};
use crate::instance::{Assignment, Constraint, Instance};
use crate::poly::{dual_discriminator, preserves, Preservation, PreservationWitness};
use crate::relation::{BinaryRel, ConstraintLanguage, Domain, Label, Relation, Var};

/// A binary instance: one label set per variable plus one binary relation per
/// pair of variables. Pairs equal to the full square are left implicit; each
/// stored pair is kept in the orientation `(min, max)` and transposed on
/// access, so the symmetry condition holds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryInstance {
    domain: Domain,
    variables: Vec<String>,
    unary: Vec<BTreeSet<Label>>,
    pairs: BTreeMap<(Var, Var), BinaryRel>,
    costs: CostMatrix,
}

impl BinaryInstance {
    pub fn new(domain: Domain, variables: Vec<String>, costs: CostMatrix) -> Result<Self> {
        if costs.num_vars() != variables.len() || costs.domain_size() != domain.size() {
            return Err(Error::Contract(String::from(
                "cost matrix dimensions do not match the binary instance",
            )));
        }
        let unary = vec![domain.labels().collect(); variables.len()];
        Ok(BinaryInstance {
            domain,
            variables,
            unary,
            pairs: BTreeMap::new(),
            costs,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn costs(&self) -> &CostMatrix {
        &self.costs
    }

    pub fn unary(&self, v: Var) -> &BTreeSet<Label> {
        &self.unary[v]
    }

    pub fn set_unary(&mut self, v: Var, labels: BTreeSet<Label>) {
        self.unary[v] = labels;
    }

    /// The relation on `(u, v)`; absent pairs read as the full square.
    pub fn pair(&self, u: Var, v: Var) -> BinaryRel {
        assert_ne!(u, v, "pair relations connect distinct variables");
        let key = (u.min(v), u.max(v));
        match self.pairs.get(&key) {
            None => BinaryRel::full(self.domain.size()),
            Some(rel) if u < v => rel.clone(),
            Some(rel) => rel.transpose(),
        }
    }

    /// Stores the relation on `(u, v)`; full relations are kept implicit.
    pub fn set_pair(&mut self, u: Var, v: Var, rel: BinaryRel) {
        assert_ne!(u, v, "pair relations connect distinct variables");
        let key = (u.min(v), u.max(v));
        let oriented = if u < v { rel } else { rel.transpose() };
        if oriented.is_full() {
            self.pairs.remove(&key);
        } else {
            self.pairs.insert(key, oriented);
        }
    }

    /// Stored pairs in canonical `(u < v)` orientation.
    pub fn materialized_pairs(&self) -> impl Iterator<Item = ((Var, Var), &BinaryRel)> {
        self.pairs.iter().map(|(&k, r)| (k, r))
    }

    pub fn satisfied_by(&self, assignment: &Assignment) -> bool {
        if assignment.len() != self.num_vars() {
            return false;
        }
        for (v, set) in self.unary.iter().enumerate() {
            if !set.contains(&assignment.label(v)) {
                return false;
            }
        }
        for (&(u, v), rel) in &self.pairs {
            if !rel.contains(assignment.label(u), assignment.label(v)) {
                return false;
            }
        }
        true
    }

    /// Rebuilds a plain instance with the same satisfying set and costs:
    /// non-full unary sets and every stored pair become named constraints.
    pub fn to_instance(&self) -> Instance {
        let mut lang = ConstraintLanguage::new(self.domain);
        let mut constraints = Vec::new();
        for (v, set) in self.unary.iter().enumerate() {
            if set.len() == self.domain.size() {
                continue;
            }
            let name = format!("u:{}", self.variables[v]);
            let tuples = set.iter().map(|&a| vec![a]).collect();
            lang.insert(
                name.clone(),
                Relation::new(self.domain, 1, tuples).expect("unary labels are in range"),
            )
            .expect("unary names are unique");
            constraints.push(Constraint {
                relation: name,
                scope: vec![v],
            });
        }
        for (&(u, v), rel) in &self.pairs {
            let name = format!("r:{}:{}", self.variables[u], self.variables[v]);
            lang.insert(name.clone(), rel.to_relation(self.domain))
                .expect("pair names are unique");
            constraints.push(Constraint {
                relation: name,
                scope: vec![u, v],
            });
        }
        Instance::new(lang, self.variables.clone(), constraints, self.costs.clone())
            .expect("binary instances convert to well-formed instances")
    }

    /// Checks the (2,3)-minimality conditions restricted to `vars`.
    pub fn check_minimal_on(&self, vars: &[Var]) -> core::result::Result<(), String> {
        for &u in vars {
            for &v in vars {
                if u == v {
                    continue;
                }
                let rel = self.pair(u, v);
                if &rel.proj_first() != self.unary(u) {
                    return Err(format!(
                        "unary set of `{}` differs from its projection on pair ({}, {})",
                        self.variables[u], self.variables[u], self.variables[v]
                    ));
                }
            }
        }
        for &u in vars {
            for &v in vars {
                if u == v {
                    continue;
                }
                let r_uv = self.pair(u, v);
                for &w in vars {
                    if w == u || w == v {
                        continue;
                    }
                    let r_uw = self.pair(u, w);
                    let r_vw = self.pair(v, w);
                    for (a, b) in r_uv.iter() {
                        let extends = self
                            .unary(w)
                            .iter()
                            .any(|&c| r_uw.contains(a, c) && r_vw.contains(b, c));
                        if !extends {
                            return Err(format!(
                                "pair ({a}, {b}) on ({}, {}) has no extension to `{}`",
                                self.variables[u], self.variables[v], self.variables[w]
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_minimal(&self) -> core::result::Result<(), String> {
        let vars: Vec<Var> = (0..self.num_vars()).collect();
        self.check_minimal_on(&vars)
    }
}

/// Converts an instance to the binary working form.
///
/// Unary constraints and infinite-cost labels fold into the label sets;
/// higher-arity constraints are replaced by all their pairwise projections.
/// With `validate`, every constrained relation of arity >= 3 must equal the
/// join of those projections, otherwise the replacement would lose tuples.
pub fn binarize(instance: &Instance, validate: bool) -> Result<BinaryInstance> {
    let resolved = instance.resolved()?;
    let d = instance.domain().size();
    let mut bi = BinaryInstance::new(
        instance.domain(),
        instance.variables.clone(),
        instance.costs.clone(),
    )?;

    for v in 0..bi.num_vars() {
        let feasible: BTreeSet<Label> = (0..d)
            .filter(|&a| instance.costs.get(v, a).is_finite())
            .collect();
        bi.set_unary(v, feasible);
    }

    if validate {
        let mut checked = BTreeSet::new();
        for c in &instance.constraints {
            if !checked.insert(c.relation.clone()) {
                continue;
            }
            let rel = instance
                .language
                .get(&c.relation)
                .ok_or_else(|| Error::UnknownRelation(c.relation.clone()))?;
            if rel.arity() >= 3 && !is_two_decomposable(rel)? {
                return Err(Error::NotTwoDecomposable(c.relation.clone()));
            }
        }
    }

    let restrict_unary = |bi: &mut BinaryInstance, v: Var, allowed: BTreeSet<Label>| {
        let narrowed: BTreeSet<Label> = bi.unary(v).intersection(&allowed).copied().collect();
        bi.set_unary(v, narrowed);
    };

    for (rel, scope) in resolved {
        match scope.len() {
            1 => {
                let allowed = rel.tuples().iter().map(|t| t[0]).collect();
                restrict_unary(&mut bi, scope[0], allowed);
            }
            2 if scope[0] == scope[1] => {
                let allowed = rel
                    .tuples()
                    .iter()
                    .filter(|t| t[0] == t[1])
                    .map(|t| t[0])
                    .collect();
                restrict_unary(&mut bi, scope[0], allowed);
            }
            2 => {
                let mut current = bi.pair(scope[0], scope[1]);
                current.intersect(&BinaryRel::from_relation(rel)?);
                bi.set_pair(scope[0], scope[1], current);
            }
            _ => {
                for i in 0..scope.len() {
                    for j in i + 1..scope.len() {
                        let proj = rel.projection(&[i, j])?;
                        if scope[i] == scope[j] {
                            let allowed = proj
                                .tuples()
                                .iter()
                                .filter(|t| t[0] == t[1])
                                .map(|t| t[0])
                                .collect();
                            restrict_unary(&mut bi, scope[i], allowed);
                        } else {
                            let mut current = bi.pair(scope[i], scope[j]);
                            current.intersect(&BinaryRel::from_relation(&proj)?);
                            bi.set_pair(scope[i], scope[j], current);
                        }
                    }
                }
            }
        }
    }
    Ok(bi)
}

/// Tuple set equals the join of all pairwise projections.
fn is_two_decomposable(rel: &Relation) -> Result<bool> {
    let k = rel.arity();
    let d = rel.domain().size();
    let size = crate::oracle::enumeration_size(d, k);
    if size > crate::oracle::DEFAULT_BUDGET as u128 {
        return Err(Error::BudgetExceeded {
            required: size,
            budget: crate::oracle::DEFAULT_BUDGET,
        });
    }
    let mut projections = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            projections.push((i, j, BinaryRel::from_relation(&rel.projection(&[i, j])?)?));
        }
    }
    let mut tuple = vec![0; k];
    let mut join_count = 0usize;
    loop {
        if projections.iter().all(|(i, j, p)| p.contains(tuple[*i], tuple[*j])) {
            join_count += 1;
            if !rel.contains(&tuple) {
                return Ok(false);
            }
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(join_count == rel.len());
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < d {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// Runs the consistency fixpoint: repeatedly drop pair tuples with no
/// extension to a third variable, then re-project the unary sets, until a
/// full sweep changes nothing. Sweeps walk ordered pairs (and inner third
/// variables) in lexicographic order, so runs are reproducible; the result
/// keeps the satisfying set intact and only ever shrinks relations.
pub fn make_23_minimal(bi: &BinaryInstance) -> BinaryInstance {
    let n = bi.num_vars();
    let d = bi.domain().size();

    // Dense working copy over both orientations, pre-intersected with the
    // unary sets so projections can only shrink.
    let mut unary: Vec<Vec<bool>> = (0..n)
        .map(|v| (0..d).map(|a| bi.unary(v).contains(&a)).collect())
        .collect();
    let mut rels: Vec<Vec<BinaryRel>> = vec![vec![BinaryRel::empty(0); n]; n];
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let mut rel = bi.pair(u, v);
            for a in 0..d {
                for b in 0..d {
                    if !unary[u][a] || !unary[v][b] {
                        rel.set(a, b, false);
                    }
                }
            }
            rels[u][v] = rel;
        }
    }

    let collapse_all = |bi: &BinaryInstance| {
        let mut out = bi.clone();
        for v in 0..n {
            out.set_unary(v, BTreeSet::new());
        }
        for u in 0..n {
            for v in u + 1..n {
                out.set_pair(u, v, BinaryRel::empty(d));
            }
        }
        out
    };

    if n == 0 {
        return bi.clone();
    }
    if unary.iter().any(|row| row.iter().all(|&x| !x)) {
        return collapse_all(bi);
    }

    loop {
        let mut changed = false;
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                for w in 0..n {
                    if w == u || w == v {
                        continue;
                    }
                    for a in 0..d {
                        for b in 0..d {
                            if !rels[u][v].contains(a, b) {
                                continue;
                            }
                            let extends =
                                (0..d).any(|c| rels[u][w].contains(a, c) && rels[v][w].contains(b, c));
                            if !extends {
                                rels[u][v].set(a, b, false);
                                rels[v][u].set(b, a, false);
                                changed = true;
                            }
                        }
                    }
                }
                if n >= 2 {
                    let proj_u = rels[u][v].proj_first();
                    let proj_v = rels[u][v].proj_second();
                    for a in 0..d {
                        if unary[u][a] && !proj_u.contains(&a) {
                            unary[u][a] = false;
                            changed = true;
                        }
                        if unary[v][a] && !proj_v.contains(&a) {
                            unary[v][a] = false;
                            changed = true;
                        }
                    }
                    if !proj_u.iter().any(|&a| unary[u][a]) {
                        return collapse_all(bi);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut out = bi.clone();
    for v in 0..n {
        out.set_unary(v, (0..d).filter(|&a| unary[v][a]).collect());
    }
    for u in 0..n {
        for v in u + 1..n {
            out.set_pair(u, v, rels[u][v].clone());
        }
    }
    out
}

/// A (2,3)-minimal instance is unsatisfiable exactly when a label set is
/// empty (and then the fixpoint has emptied all of them).
pub fn is_trivial(bi: &BinaryInstance) -> bool {
    bi.num_vars() > 0 && (0..bi.num_vars()).any(|v| bi.unary(v).is_empty())
}

/// The shape of a binary relation preserved by the dual discriminator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BinaryClass {
    /// `left x right`.
    Product {
        left: BTreeSet<Label>,
        right: BTreeSet<Label>,
    },
    /// `({apex_left} x right) U (left x {apex_right})` with the apexes inside
    /// the respective sides.
    TwoFan {
        apex_left: Label,
        left: BTreeSet<Label>,
        apex_right: Label,
        right: BTreeSet<Label>,
    },
    /// The graph of a bijection `left -> right`.
    Bijection { map: BTreeMap<Label, Label> },
    /// Not preserved by the dual discriminator; carries concrete evidence.
    NotPreserved(PreservationWitness),
}

impl BinaryClass {
    pub fn is_preserved(&self) -> bool {
        !matches!(self, BinaryClass::NotPreserved(_))
    }

    /// Rebuilds the relation described by the classification fields.
    pub fn reconstruct(&self, domain: Domain) -> Option<BinaryRel> {
        let d = domain.size();
        match self {
            BinaryClass::Product { left, right } => Some(BinaryRel::product(left, right, d)),
            BinaryClass::TwoFan {
                apex_left,
                left,
                apex_right,
                right,
            } => {
                let mut rel = BinaryRel::empty(d);
                for &b in right {
                    rel.set(*apex_left, b, true);
                }
                for &a in left {
                    rel.set(a, *apex_right, true);
                }
                Some(rel)
            }
            BinaryClass::Bijection { map } => {
                let mut rel = BinaryRel::empty(d);
                for (&a, &b) in map {
                    rel.set(a, b, true);
                }
                Some(rel)
            }
            BinaryClass::NotPreserved(_) => None,
        }
    }
}

/// Classifies a binary relation as product, two-fan, or bijection, or
/// produces a dual-discriminator violation witness. The three shapes overlap
/// only through products, so they are tried in that order.
pub fn classify_01all(rel: &Relation) -> Result<BinaryClass> {
    if rel.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: rel.arity(),
        });
    }
    let domain = rel.domain();
    let d = domain.size();
    let bits = BinaryRel::from_relation(rel)?;
    let left = bits.proj_first();
    let right = bits.proj_second();

    if bits == BinaryRel::product(&left, &right, d) {
        return Ok(BinaryClass::Product { left, right });
    }

    let full_row = left
        .iter()
        .copied()
        .find(|&a| right.iter().all(|&b| bits.contains(a, b)));
    let full_col = right
        .iter()
        .copied()
        .find(|&b| left.iter().all(|&a| bits.contains(a, b)));
    if let (Some(apex_left), Some(apex_right)) = (full_row, full_col) {
        let candidate = BinaryClass::TwoFan {
            apex_left,
            left: left.clone(),
            apex_right,
            right: right.clone(),
        };
        if candidate.reconstruct(domain).as_ref() == Some(&bits) {
            return Ok(candidate);
        }
    }

    let mut map = BTreeMap::new();
    let mut bijective = true;
    for &a in &left {
        let row = bits.row(a);
        if row.len() != 1 {
            bijective = false;
            break;
        }
        let b = *row.iter().next().expect("row has one element");
        if map.values().any(|&existing| existing == b) {
            bijective = false;
            break;
        }
        map.insert(a, b);
    }
    if bijective {
        return Ok(BinaryClass::Bijection { map });
    }

    match preserves(&dual_discriminator(domain), rel)? {
        Preservation::Violated(witness) => Ok(BinaryClass::NotPreserved(witness)),
        Preservation::Preserved => Err(Error::Invariant(String::from(
            "relation preserved by the dual discriminator matched no shape",
        ))),
    }
}

/// Variables forced to a single label once `u0` takes label `a`, together
/// with those labels. Always contains `u0 -> a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixResult {
    pub fixed: BTreeMap<Var, Label>,
}

pub fn fixed_set(bi: &BinaryInstance, u0: Var, a: Label) -> Result<FixResult> {
    if u0 >= bi.num_vars() {
        return Err(Error::UnknownVariable {
            var: u0,
            num_vars: bi.num_vars(),
        });
    }
    if !bi.unary(u0).contains(&a) {
        return Err(Error::LabelNotFeasible { var: u0, label: a });
    }
    let mut fixed = BTreeMap::from([(u0, a)]);
    for v in 0..bi.num_vars() {
        if v == u0 {
            continue;
        }
        let rel = bi.pair(u0, v);
        let mut compatible = bi.unary(v).iter().copied().filter(|&b| rel.contains(a, b));
        if let Some(b) = compatible.next() {
            if compatible.next().is_none() {
                fixed.insert(v, b);
            }
        }
    }
    Ok(FixResult { fixed })
}

fn ensure_solvable(bi: &BinaryInstance) -> Result<()> {
    if is_trivial(bi) {
        return Err(Error::Contract(String::from(
            "instance is trivial (some label set is empty)",
        )));
    }
    if let Err(reason) = bi.check_minimal() {
        return Err(Error::Contract(format!("instance is not (2,3)-minimal: {reason}")));
    }
    for ((u, v), rel) in bi.materialized_pairs() {
        let class = classify_01all(&rel.to_relation(bi.domain()))?;
        if !class.is_preserved() {
            return Err(Error::Contract(format!(
                "pair ({}, {}) is not preserved by the dual discriminator",
                bi.variables()[u],
                bi.variables()[v]
            )));
        }
    }
    Ok(())
}

/// Extracts a satisfying assignment from a nontrivial (2,3)-minimal instance
/// whose pairs are all products, two-fans, or bijections: repeatedly assign
/// the lowest-index unassigned variable its lowest feasible label and commit
/// every variable that choice fixes. The remaining variables always induce a
/// nontrivial (2,3)-minimal sub-instance, so the loop never backtracks.
pub fn solve_23minimal(bi: &BinaryInstance) -> Result<Assignment> {
    ensure_solvable(bi)?;
    let mut labels: Vec<Option<Label>> = vec![None; bi.num_vars()];
    let mut remaining: BTreeSet<Var> = (0..bi.num_vars()).collect();
    while let Some(&v) = remaining.iter().next() {
        let a = *bi
            .unary(v)
            .iter()
            .next()
            .ok_or_else(|| Error::Invariant("empty label set on a nontrivial instance".to_string()))?;
        let fix = fixed_set(bi, v, a)?;
        for (&u, &b) in &fix.fixed {
            if remaining.remove(&u) {
                labels[u] = Some(b);
            }
        }
        #[cfg(debug_assertions)]
        {
            let rest: Vec<Var> = remaining.iter().copied().collect();
            debug_assert!(bi.check_minimal_on(&rest).is_ok());
        }
    }
    let labels = labels
        .into_iter()
        .map(|l| l.ok_or_else(|| Error::Invariant("unassigned variable".to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Assignment::new(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ExtendedCost;
    use crate::oracle::{enumerate_satisfying, DEFAULT_BUDGET};

    fn d(n: usize) -> Domain {
        Domain::new(n).unwrap()
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn eq_rel(dom: Domain) -> Relation {
        let tuples = dom.labels().map(|a| vec![a, a]).collect();
        Relation::new(dom, 2, tuples).unwrap()
    }

    fn instance_with(
        dom: Domain,
        n: usize,
        rels: Vec<(&str, Relation)>,
        constraints: Vec<(&str, Vec<Var>)>,
    ) -> Instance {
        let mut lang = ConstraintLanguage::new(dom);
        for (name, rel) in rels {
            lang.insert(name, rel).unwrap();
        }
        Instance::new(
            lang,
            names(n),
            constraints
                .into_iter()
                .map(|(r, scope)| Constraint {
                    relation: r.to_string(),
                    scope,
                })
                .collect(),
            CostMatrix::new_zero(n, dom.size()),
        )
        .unwrap()
    }

    #[test]
    fn ternary_all_equal_binarizes_to_pairwise_equalities() {
        let dom = d(2);
        let all_eq = Relation::new(dom, 3, vec![vec![0, 0, 0], vec![1, 1, 1]]).unwrap();
        let inst = instance_with(dom, 3, vec![("alleq", all_eq)], vec![("alleq", vec![0, 1, 2])]);
        let bi = binarize(&inst, true).unwrap();
        let eq = BinaryRel::from_relation(&eq_rel(dom)).unwrap();
        assert_eq!(bi.pair(0, 1), eq);
        assert_eq!(bi.pair(0, 2), eq);
        assert_eq!(bi.pair(1, 2), eq);
        let before: Vec<_> = enumerate_satisfying(&inst, DEFAULT_BUDGET).unwrap().collect();
        let after: Vec<_> = enumerate_satisfying(&bi.to_instance(), DEFAULT_BUDGET)
            .unwrap()
            .collect();
        assert_eq!(before, after);
        assert_eq!(before.len(), 2);
    }

    #[test]
    fn parity_relation_is_not_two_decomposable() {
        let dom = d(2);
        let parity = Relation::new(
            dom,
            3,
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        )
        .unwrap();
        let inst = instance_with(dom, 3, vec![("xor3", parity)], vec![("xor3", vec![0, 1, 2])]);
        assert_eq!(
            binarize(&inst, true).unwrap_err(),
            Error::NotTwoDecomposable("xor3".to_string())
        );
        // Without validation the projections are taken as-is.
        assert!(binarize(&inst, false).is_ok());
    }

    #[test]
    fn already_binary_instance_is_unchanged() {
        let dom = d(3);
        let rel = Relation::new(dom, 2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        let inst = instance_with(dom, 2, vec![("f", rel.clone())], vec![("f", vec![0, 1])]);
        let bi = binarize(&inst, true).unwrap();
        assert_eq!(bi.pair(0, 1), BinaryRel::from_relation(&rel).unwrap());
        assert_eq!(bi.unary(0), &dom.labels().collect::<BTreeSet<_>>());
    }

    #[test]
    fn infinite_costs_prune_labels() {
        let dom = d(2);
        let mut inst = instance_with(dom, 1, vec![], vec![]);
        inst.costs.set(0, 0, ExtendedCost::Infinite).unwrap();
        let bi = binarize(&inst, true).unwrap();
        assert_eq!(bi.unary(0), &BTreeSet::from([1]));
    }

    #[test]
    fn contradictory_triangle_collapses_to_empty() {
        let dom = d(2);
        let neq = Relation::new(dom, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let inst = instance_with(
            dom,
            3,
            vec![("eq", eq_rel(dom)), ("neq", neq)],
            vec![("eq", vec![0, 1]), ("eq", vec![1, 2]), ("neq", vec![0, 2])],
        );
        let bi = make_23_minimal(&binarize(&inst, true).unwrap());
        assert!(is_trivial(&bi));
        for v in 0..3 {
            assert!(bi.unary(v).is_empty());
        }
        assert!(bi.check_minimal().is_ok());
        assert_eq!(
            enumerate_satisfying(&bi.to_instance(), DEFAULT_BUDGET)
                .unwrap()
                .count(),
            0
        );
    }

    #[test]
    fn fixpoint_is_idempotent() {
        let dom = d(3);
        let rel = Relation::new(dom, 2, vec![vec![0, 1], vec![1, 2], vec![2, 0], vec![0, 0]]).unwrap();
        let inst = instance_with(
            dom,
            3,
            vec![("f", rel)],
            vec![("f", vec![0, 1]), ("f", vec![1, 2])],
        );
        let bi = make_23_minimal(&binarize(&inst, true).unwrap());
        assert!(bi.check_minimal().is_ok());
        assert_eq!(make_23_minimal(&bi), bi);
    }

    #[test]
    fn permutation_chain_propagates_singletons() {
        // x -> y -> z through the cycle 0->1->2->0, with x pinned to 0.
        let dom = d(3);
        let cycle = Relation::new(dom, 2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        let pin = Relation::new(dom, 1, vec![vec![0]]).unwrap();
        let inst = instance_with(
            dom,
            3,
            vec![("cyc", cycle), ("pin", pin)],
            vec![("pin", vec![0]), ("cyc", vec![0, 1]), ("cyc", vec![1, 2])],
        );
        let bi = make_23_minimal(&binarize(&inst, true).unwrap());
        assert_eq!(bi.unary(0), &BTreeSet::from([0]));
        assert_eq!(bi.unary(1), &BTreeSet::from([1]));
        assert_eq!(bi.unary(2), &BTreeSet::from([2]));
    }

    #[test]
    fn classifier_recognizes_the_three_shapes() {
        let dom = d(2);
        assert_eq!(
            classify_01all(&Relation::full(dom, 2)).unwrap(),
            BinaryClass::Product {
                left: BTreeSet::from([0, 1]),
                right: BTreeSet::from([0, 1]),
            }
        );
        let fan = Relation::new(dom, 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        match classify_01all(&fan).unwrap() {
            BinaryClass::TwoFan {
                apex_left,
                apex_right,
                ..
            } => {
                assert_eq!((apex_left, apex_right), (0, 1));
            }
            other => panic!("expected a two-fan, got {other:?}"),
        }
        let dom3 = d(3);
        let broken = Relation::new(
            dom3,
            2,
            vec![vec![0, 0], vec![1, 1], vec![2, 2], vec![0, 1]],
        )
        .unwrap();
        match classify_01all(&broken).unwrap() {
            BinaryClass::NotPreserved(w) => assert!(w.verify(&dual_discriminator(dom3))),
            other => panic!("expected a violation, got {other:?}"),
        }
        let bij = Relation::new(dom3, 2, vec![vec![0, 2], vec![2, 0]]).unwrap();
        match classify_01all(&bij).unwrap() {
            BinaryClass::Bijection { map } => {
                assert_eq!(map, BTreeMap::from([(0, 2), (2, 0)]));
            }
            other => panic!("expected a bijection, got {other:?}"),
        }
    }

    #[test]
    fn classifier_reconstruction_matches_input() {
        // Every preserved shape rebuilds the original relation exactly.
        let dom = d(3);
        for mask in 0u32..512 {
            let tuples: Vec<Vec<Label>> = (0..9)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| vec![i / 3, i % 3])
                .collect();
            let rel = Relation::new(dom, 2, tuples).unwrap();
            let class = classify_01all(&rel).unwrap();
            if let Some(rebuilt) = class.reconstruct(dom) {
                assert_eq!(rebuilt, BinaryRel::from_relation(&rel).unwrap(), "mask {mask}");
            }
        }
    }

    #[test]
    fn fixing_examples() {
        let dom = d(2);
        let mut bi = BinaryInstance::new(dom, names(2), CostMatrix::new_zero(2, 2)).unwrap();
        // Permutation pair: fixing u forces its partner.
        let swap = Relation::new(dom, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        bi.set_pair(0, 1, BinaryRel::from_relation(&swap).unwrap());
        let fix = fixed_set(&bi, 0, 0).unwrap();
        assert_eq!(fix.fixed, BTreeMap::from([(0, 0), (1, 1)]));

        // Full pair: nothing else is fixed.
        let mut free = BinaryInstance::new(dom, names(2), CostMatrix::new_zero(2, 2)).unwrap();
        free.set_pair(0, 1, BinaryRel::full(2));
        let fix = fixed_set(&free, 0, 0).unwrap();
        assert_eq!(fix.fixed, BTreeMap::from([(0, 0)]));

        // Two-fan fixed from its non-apex row.
        let fan = Relation::new(dom, 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let mut fan_bi = BinaryInstance::new(dom, names(2), CostMatrix::new_zero(2, 2)).unwrap();
        fan_bi.set_pair(0, 1, BinaryRel::from_relation(&fan).unwrap());
        let fix = fixed_set(&fan_bi, 0, 1).unwrap();
        assert_eq!(fix.fixed, BTreeMap::from([(0, 1), (1, 1)]));

        assert!(matches!(
            fixed_set(&fan_bi, 0, 5),
            Err(Error::LabelNotFeasible { .. })
        ));
    }

    #[test]
    fn solver_assigns_lowest_feasible_labels() {
        let dom = d(3);
        let mut bi = BinaryInstance::new(dom, names(1), CostMatrix::new_zero(1, 3)).unwrap();
        bi.set_unary(0, BTreeSet::from([1, 2]));
        assert_eq!(solve_23minimal(&bi).unwrap().labels(), &[1]);
    }

    #[test]
    fn solver_follows_forced_chains() {
        let dom = d(3);
        let cycle = Relation::new(dom, 2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        let pin = Relation::new(dom, 1, vec![vec![0]]).unwrap();
        let inst = instance_with(
            dom,
            3,
            vec![("cyc", cycle), ("pin", pin)],
            vec![("pin", vec![0]), ("cyc", vec![0, 1]), ("cyc", vec![1, 2])],
        );
        let bi = make_23_minimal(&binarize(&inst, true).unwrap());
        let a = solve_23minimal(&bi).unwrap();
        assert_eq!(a.labels(), &[0, 1, 2]);
        assert!(inst.evaluate(&a).unwrap().satisfying);
    }

    #[test]
    fn solver_rejects_bad_contracts() {
        let dom = d(2);
        let neq = Relation::new(dom, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let inst = instance_with(
            dom,
            3,
            vec![("eq", eq_rel(dom)), ("neq", neq)],
            vec![("eq", vec![0, 1]), ("eq", vec![1, 2]), ("neq", vec![0, 2])],
        );
        let trivial = make_23_minimal(&binarize(&inst, true).unwrap());
        assert!(matches!(solve_23minimal(&trivial), Err(Error::Contract(_))));

        // Minimal but with a pair the dual discriminator does not preserve.
        let dom3 = d(3);
        let broken = Relation::new(
            dom3,
            2,
            vec![vec![0, 0], vec![1, 1], vec![2, 2], vec![0, 1]],
        )
        .unwrap();
        let inst = instance_with(dom3, 2, vec![("b", broken)], vec![("b", vec![0, 1])]);
        let bi = make_23_minimal(&binarize(&inst, true).unwrap());
        if !is_trivial(&bi) {
            assert!(matches!(solve_23minimal(&bi), Err(Error::Contract(_))));
        }
    }
}
