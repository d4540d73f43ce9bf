//! Constructive reductions and generators: named hard relations, Min UnCut /
//! hypergraph-cover / nearest-codeword instance builders, gadget application
//! for primitive-positive definitions, the permutation-language dichotomy,
//! and a seeded generator of dual-discriminator instances.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::cost::{CostMatrix, ExtendedCost};
use crate::error::{Error, Result};
use crate::instance::{Constraint, Instance};
use crate::poly::{dual_discriminator, preserves_language, Operation};
use crate::relation::{ConstraintLanguage, Domain, Label, Relation, Var};
use crate::rng::SplitMix64;

/// Binary relation over `{0,1,2}`: holds when `x != y`, or `x = y = 2`.
/// Label 2 acts as a wildcard vertex with a self-loop.
pub fn wildcard_neq_relation() -> Relation {
    let d = Domain::new(3).expect("3 > 0");
    let tuples = (0..3)
        .flat_map(|x| (0..3).map(move |y| (x, y)))
        .filter(|&(x, y)| x != y || x == 2)
        .map(|(x, y)| vec![x, y])
        .collect();
    Relation::new(d, 2, tuples).expect("tuples are in range")
}

/// `{0,1}^k` minus the all-zero tuple: the hypergraph-cover relation.
pub fn not_all_zero_relation(k: usize) -> Result<Relation> {
    if k == 0 {
        return Err(Error::ParamOutOfRange(String::from("arity must be positive")));
    }
    if k > 20 {
        return Err(Error::ParamOutOfRange(String::from(
            "cover relation arity capped at 20",
        )));
    }
    let d = Domain::new(2).expect("2 > 0");
    let tuples = (1u32..(1 << k))
        .map(|mask| (0..k).map(|i| ((mask >> (k - 1 - i)) & 1) as Label).collect())
        .collect();
    Relation::new(d, k, tuples)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= p {
        if p.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// `{(x, y, z) : ax + by + cz = 0 mod p}` over the field with `p` elements.
pub fn linear_triple_relation(p: u64, a: u64, b: u64, c: u64) -> Result<Relation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let d = Domain::new(p as usize)?;
    let (a, b, c) = (a % p, b % p, c % p);
    let mut tuples = Vec::new();
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                if (a * x + b * y + c * z) % p == 0 {
                    tuples.push(vec![x as Label, y as Label, z as Label]);
                }
            }
        }
    }
    Relation::new(d, 3, tuples)
}

/// Undirected graph with non-negative rational edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize, BigRational)>,
}

impl WeightedGraph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize, BigRational)>) -> Result<Self> {
        let graph = WeightedGraph {
            num_vertices,
            edges,
        };
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<()> {
        for (index, (u, v, w)) in self.edges.iter().enumerate() {
            if u == v {
                return Err(Error::SelfLoop { index, vertex: *u });
            }
            for &x in [u, v] {
                if x >= self.num_vertices {
                    return Err(Error::UnknownVariable {
                        var: x,
                        num_vars: self.num_vertices,
                    });
                }
            }
            if w < &BigRational::zero() {
                return Err(Error::ParamOutOfRange(format!(
                    "edge {index} has negative weight"
                )));
            }
        }
        Ok(())
    }
}

/// Uniform hypergraph with per-vertex non-negative weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub num_vertices: usize,
    pub edges: Vec<Vec<usize>>,
    pub weights: Vec<BigRational>,
}

impl Hypergraph {
    pub fn new(
        num_vertices: usize,
        edges: Vec<Vec<usize>>,
        weights: Vec<BigRational>,
    ) -> Result<Self> {
        let h = Hypergraph {
            num_vertices,
            edges,
            weights,
        };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        let k = self.uniform_size()?;
        if k < 2 {
            return Err(Error::ParamOutOfRange(String::from(
                "hyperedges must contain at least 2 vertices",
            )));
        }
        if self.weights.len() != self.num_vertices {
            return Err(Error::ParamOutOfRange(String::from(
                "one weight per vertex required",
            )));
        }
        for w in &self.weights {
            if w < &BigRational::zero() {
                return Err(Error::ParamOutOfRange(String::from("negative vertex weight")));
            }
        }
        for edge in &self.edges {
            for &v in edge {
                if v >= self.num_vertices {
                    return Err(Error::UnknownVariable {
                        var: v,
                        num_vars: self.num_vertices,
                    });
                }
            }
            let distinct: BTreeSet<usize> = edge.iter().copied().collect();
            if distinct.len() != edge.len() {
                return Err(Error::ParamOutOfRange(String::from(
                    "hyperedges may not repeat vertices",
                )));
            }
        }
        Ok(())
    }

    pub fn uniform_size(&self) -> Result<usize> {
        let k = self.edges.first().map_or(2, Vec::len);
        for (index, edge) in self.edges.iter().enumerate() {
            if edge.len() != k {
                return Err(Error::NonUniformHyperedge {
                    index,
                    expected: k,
                    found: edge.len(),
                });
            }
        }
        Ok(k)
    }
}

/// Parity-check matrix and target vector over the field with `p` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    pub p: u64,
    pub matrix: Vec<Vec<u64>>,
    pub target: Vec<u64>,
}

impl LinearCode {
    pub fn new(p: u64, matrix: Vec<Vec<u64>>, target: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let n = target.len();
        for row in &matrix {
            if row.len() != n {
                return Err(Error::ParamOutOfRange(String::from(
                    "matrix rows must match the target length",
                )));
            }
        }
        let matrix = matrix
            .into_iter()
            .map(|row| row.into_iter().map(|x| x % p).collect())
            .collect();
        let target = target.into_iter().map(|x| x % p).collect();
        Ok(LinearCode { p, matrix, target })
    }
}

/// Encodes Min UnCut: vertex variables plus two relay variables per edge,
/// chained through the wildcard relation. Setting a relay to the wildcard
/// pays the edge weight; setting a vertex to the wildcard pays the total
/// edge weight (never less than 1), so optima never use it and the optimum
/// equals the minimum total weight of uncut edges.
pub fn min_uncut_to_csp(graph: &WeightedGraph) -> Result<Instance> {
    graph.validate()?;
    let d = Domain::new(3)?;
    let mut lang = ConstraintLanguage::new(d);
    lang.insert("wneq", wildcard_neq_relation())?;

    let mut variables: Vec<String> = (0..graph.num_vertices).map(|i| format!("v{i}")).collect();
    let mut constraints = Vec::new();
    let relay_base = graph.num_vertices;
    for (e, (u, v, _)) in graph.edges.iter().enumerate() {
        let za = relay_base + 2 * e;
        let zb = relay_base + 2 * e + 1;
        variables.push(format!("z{e}a"));
        variables.push(format!("z{e}b"));
        constraints.push(Constraint {
            relation: "wneq".to_string(),
            scope: vec![*u, za],
        });
        constraints.push(Constraint {
            relation: "wneq".to_string(),
            scope: vec![za, zb],
        });
        constraints.push(Constraint {
            relation: "wneq".to_string(),
            scope: vec![zb, *v],
        });
    }

    let total_weight: BigRational = graph
        .edges
        .iter()
        .map(|(_, _, w)| w.clone())
        .fold(BigRational::zero(), |acc, w| acc + w);
    let one = BigRational::from_integer(1.into());
    let vertex_wildcard_cost = if total_weight > one {
        total_weight
    } else {
        one
    };

    let mut costs = CostMatrix::new_zero(variables.len(), 3);
    for x in 0..graph.num_vertices {
        costs.set(x, 2, ExtendedCost::Finite(vertex_wildcard_cost.clone()))?;
    }
    for (e, (_, _, w)) in graph.edges.iter().enumerate() {
        costs.set(relay_base + 2 * e, 2, ExtendedCost::Finite(w.clone()))?;
        costs.set(relay_base + 2 * e + 1, 2, ExtendedCost::Finite(w.clone()))?;
    }
    Instance::new(lang, variables, constraints, costs)
}

/// Encodes weighted vertex cover of a uniform hypergraph: one cover
/// constraint per hyperedge, label 1 priced at the vertex weight.
pub fn hypergraph_cover_to_csp(h: &Hypergraph) -> Result<Instance> {
    h.validate()?;
    let k = h.uniform_size()?;
    let d = Domain::new(2)?;
    let mut lang = ConstraintLanguage::new(d);
    lang.insert(format!("cover{k}"), not_all_zero_relation(k)?)?;

    let variables: Vec<String> = (0..h.num_vertices).map(|i| format!("v{i}")).collect();
    let constraints = h
        .edges
        .iter()
        .map(|edge| Constraint {
            relation: format!("cover{k}"),
            scope: edge.clone(),
        })
        .collect();
    let mut costs = CostMatrix::new_zero(h.num_vertices, 2);
    for (v, w) in h.weights.iter().enumerate() {
        costs.set(v, 1, ExtendedCost::Finite(w.clone()))?;
    }
    Instance::new(lang, variables, constraints, costs)
}

/// Encodes nearest codeword over the field with `p` elements: each
/// parity-check row is split left-to-right into three-term linear relations
/// with fresh zero-cost carry variables, one- and two-term rows are padded
/// with dummies forced to zero by infinite costs, and deviating from the
/// target vector costs 1 per coordinate. The optimum equals the minimum
/// Hamming distance from the target to the code.
pub fn nearest_codeword_to_csp(code: &LinearCode) -> Result<Instance> {
    let p = code.p;
    let d = Domain::new(p as usize)?;
    let mut lang = ConstraintLanguage::new(d);
    let mut variables: Vec<String> = (0..code.target.len()).map(|i| format!("y{i}")).collect();
    let mut costs_vec: Vec<(Var, Label, ExtendedCost)> = Vec::new();
    let mut constraints = Vec::new();

    let ensure_relation =
        |lang: &mut ConstraintLanguage, a: u64, b: u64, c: u64| -> Result<String> {
            let name = format!("g{a}_{b}_{c}");
            if lang.get(&name).is_none() {
                lang.insert(name.clone(), linear_triple_relation(p, a, b, c)?)?;
            }
            Ok(name)
        };

    let fresh_forced_zero = |variables: &mut Vec<String>,
                                 costs: &mut Vec<(Var, Label, ExtendedCost)>|
     -> Var {
        let v = variables.len();
        variables.push(format!("zero{v}"));
        for a in 1..p as usize {
            costs.push((v, a, ExtendedCost::Infinite));
        }
        v
    };

    for (row_index, row) in code.matrix.iter().enumerate() {
        let mut terms: Vec<(u64, Var)> = row
            .iter()
            .enumerate()
            .filter(|(_, &coeff)| coeff % p != 0)
            .map(|(i, &coeff)| (coeff % p, i))
            .collect();
        if terms.is_empty() {
            continue;
        }
        // Split off the two leftmost terms until at most three remain; the
        // carry variable enters the remainder negated.
        let mut chain = 0;
        while terms.len() > 3 {
            let (c1, x1) = terms[0];
            let (c2, x2) = terms[1];
            let carry = variables.len();
            variables.push(format!("t{row_index}_{chain}"));
            chain += 1;
            let name = ensure_relation(&mut lang, c1, c2, 1)?;
            constraints.push(Constraint {
                relation: name,
                scope: vec![x1, x2, carry],
            });
            let mut rest = vec![(p - 1, carry)];
            rest.extend_from_slice(&terms[2..]);
            terms = rest;
        }
        let scope_and_coeffs: (Vec<u64>, Vec<Var>) = match terms.len() {
            3 => (
                vec![terms[0].0, terms[1].0, terms[2].0],
                vec![terms[0].1, terms[1].1, terms[2].1],
            ),
            2 => {
                let dummy = fresh_forced_zero(&mut variables, &mut costs_vec);
                (vec![terms[0].0, terms[1].0, 1], vec![terms[0].1, terms[1].1, dummy])
            }
            1 => {
                let d1 = fresh_forced_zero(&mut variables, &mut costs_vec);
                let d2 = fresh_forced_zero(&mut variables, &mut costs_vec);
                (vec![terms[0].0, 1, 1], vec![terms[0].1, d1, d2])
            }
            _ => unreachable!("loop leaves between 1 and 3 terms"),
        };
        let name = ensure_relation(
            &mut lang,
            scope_and_coeffs.0[0],
            scope_and_coeffs.0[1],
            scope_and_coeffs.0[2],
        )?;
        constraints.push(Constraint {
            relation: name,
            scope: scope_and_coeffs.1,
        });
    }

    let mut costs = CostMatrix::new_zero(variables.len(), p as usize);
    for (i, &target) in code.target.iter().enumerate() {
        for a in 0..p as usize {
            if a != target as usize {
                costs.set(i, a, ExtendedCost::from_integer(1))?;
            }
        }
    }
    for (v, a, c) in costs_vec {
        costs.set(v, a, c)?;
    }
    Instance::new(lang, variables, constraints, costs)
}

/// A variable slot inside a gadget body: a head position of the defined
/// relation or one of the gadget's auxiliary variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetVar {
    Head(usize),
    Aux(usize),
}

/// An existentially quantified conjunctive definition of one relation: the
/// body names source-language relations (or `"eq"`) over head and auxiliary
/// variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpGadget {
    pub arity: usize,
    pub aux_count: usize,
    pub body: Vec<(String, Vec<GadgetVar>)>,
}

/// A partial surjection from source labels onto target labels; keys are the
/// encoding set, values the encoded labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub map: BTreeMap<Label, Label>,
}

impl LabelMap {
    pub fn identity(domain: Domain) -> Self {
        LabelMap {
            map: domain.labels().map(|a| (a, a)).collect(),
        }
    }
}

fn equality_relation_name(lang: &ConstraintLanguage) -> Option<String> {
    let d = lang.domain();
    let diagonal: Vec<Vec<Label>> = d.labels().map(|a| vec![a, a]).collect();
    let target = Relation::new(d, 2, diagonal).expect("diagonal is valid");
    lang.iter()
        .find(|(_, rel)| **rel == target)
        .map(|(name, _)| name.clone())
}

/// Rewrites an instance over one language into an instance over another:
/// every constraint is replaced by its gadget body over fresh zero-cost
/// auxiliaries, and costs are pulled back through the label map (labels
/// outside the encoding set are priced out). The optimum is preserved.
pub fn pp_apply(
    target: &Instance,
    gadgets: &BTreeMap<String, PpGadget>,
    source_lang: &ConstraintLanguage,
    label_map: &LabelMap,
) -> Result<Instance> {
    let source_domain = source_lang.domain();
    let target_domain = target.domain();
    let mut covered = BTreeSet::new();
    for (&b, &a) in &label_map.map {
        if b >= source_domain.size() {
            return Err(Error::LabelOutOfRange {
                label: b,
                domain_size: source_domain.size(),
            });
        }
        if a >= target_domain.size() {
            return Err(Error::LabelOutOfRange {
                label: a,
                domain_size: target_domain.size(),
            });
        }
        covered.insert(a);
    }
    if covered.len() != target_domain.size() {
        return Err(Error::ParamOutOfRange(String::from(
            "label map must cover every target label",
        )));
    }

    let equality = equality_relation_name(source_lang);
    let mut variables = target.variables.clone();
    let mut constraints = Vec::new();
    let num_original = variables.len();

    for (index, constraint) in target.constraints.iter().enumerate() {
        let gadget = gadgets
            .get(&constraint.relation)
            .ok_or_else(|| Error::MissingGadget(constraint.relation.clone()))?;
        if gadget.arity != constraint.scope.len() {
            return Err(Error::ScopeMismatch {
                relation: constraint.relation.clone(),
                expected: gadget.arity,
                found: constraint.scope.len(),
            });
        }
        let aux_base = variables.len();
        for j in 0..gadget.aux_count {
            variables.push(format!("aux{index}_{j}"));
        }
        for (name, slots) in &gadget.body {
            let resolved_name = if source_lang.get(name).is_some() {
                name.clone()
            } else if name == "eq" {
                equality.clone().ok_or(Error::EqualityUnavailable)?
            } else {
                return Err(Error::UnknownRelation(name.clone()));
            };
            let scope = slots
                .iter()
                .map(|slot| match slot {
                    GadgetVar::Head(i) => {
                        constraint.scope.get(*i).copied().ok_or_else(|| {
                            Error::ParamOutOfRange(format!(
                                "gadget for `{}` references head {i} beyond arity",
                                constraint.relation
                            ))
                        })
                    }
                    GadgetVar::Aux(j) => {
                        if *j >= gadget.aux_count {
                            Err(Error::ParamOutOfRange(format!(
                                "gadget for `{}` references auxiliary {j} beyond count",
                                constraint.relation
                            )))
                        } else {
                            Ok(aux_base + j)
                        }
                    }
                })
                .collect::<Result<Vec<Var>>>()?;
            constraints.push(Constraint {
                relation: resolved_name,
                scope,
            });
        }
    }

    let mut costs = CostMatrix::new_zero(variables.len(), source_domain.size());
    for v in 0..num_original {
        for b in source_domain.labels() {
            match label_map.map.get(&b) {
                Some(&a) => costs.set(v, b, target.costs.get(v, a).clone())?,
                None => costs.set(v, b, ExtendedCost::Infinite)?,
            }
        }
    }
    Instance::new(source_lang.clone(), variables, constraints, costs)
}

/// Verdict for languages containing all permutation relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dichotomy {
    /// Approximable within a factor equal to the domain size.
    Approximable { ratio: usize },
    /// No near-unanimity polymorphism exists; no constant factor is achievable.
    HardNoNu,
}

pub fn permutation_relation(domain: Domain, sigma: &[Label]) -> Result<Relation> {
    if sigma.len() != domain.size() {
        return Err(Error::ParamOutOfRange(String::from(
            "permutation length must match the domain size",
        )));
    }
    let tuples = sigma.iter().enumerate().map(|(a, &b)| vec![a, b]).collect();
    Relation::new(domain, 2, tuples)
}

fn lex_permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = Some((0..n).collect());
    core::iter::from_fn(move || {
        let result = current.clone()?;
        // Next permutation in lexicographic order.
        let mut next = result.clone();
        let mut i = n.saturating_sub(1);
        while i > 0 && next[i - 1] >= next[i] {
            i -= 1;
        }
        if i == 0 {
            current = None;
        } else {
            let mut j = n - 1;
            while next[j] <= next[i - 1] {
                j -= 1;
            }
            next.swap(i - 1, j);
            next[i..].reverse();
            current = Some(next);
        }
        Some(result)
    })
}

/// Decides constant-factor approximability for a language containing all
/// permutation relations: approximable exactly when a coordinate variant of
/// the dual discriminator (majority value, falling back to the i-th argument)
/// preserves the language.
pub fn classify_permutation_language(lang: &ConstraintLanguage) -> Result<Dichotomy> {
    let domain = lang.domain();
    for sigma in lex_permutations(domain.size()) {
        let wanted = permutation_relation(domain, &sigma)?;
        if !lang.iter().any(|(_, rel)| *rel == wanted) {
            return Err(Error::MissingPermutation(sigma));
        }
    }
    for coordinate in 0..3 {
        let variant = Operation::from_fn(domain, 3, |args| {
            for &candidate in args {
                if args.iter().filter(|&&x| x == candidate).count() >= 2 {
                    return candidate;
                }
            }
            args[coordinate]
        })?;
        if coordinate == 0 {
            debug_assert_eq!(variant, dual_discriminator(domain));
        }
        if preserves_language(&variant, lang)?.is_preserved() {
            return Ok(Dichotomy::Approximable {
                ratio: domain.size(),
            });
        }
    }
    Ok(Dichotomy::HardNoNu)
}

fn nonempty_subset(rng: &mut SplitMix64, d: usize) -> BTreeSet<Label> {
    loop {
        let set: BTreeSet<Label> = (0..d).filter(|_| rng.chance(0.5)).collect();
        if !set.is_empty() {
            return set;
        }
    }
}

fn pick(rng: &mut SplitMix64, set: &BTreeSet<Label>) -> Label {
    let index = rng.below(set.len());
    *set.iter().nth(index).expect("index below len")
}

/// Seeded random instance whose pair constraints are all products, two-fans,
/// or bijections, with integer costs in `0..=cost_max`. Deterministic in the
/// seed.
pub fn gen_random_01all(
    seed: u64,
    domain_size: usize,
    num_vars: usize,
    density: f64,
    cost_max: u64,
) -> Result<Instance> {
    let domain = Domain::new(domain_size)?;
    let mut rng = SplitMix64::new(seed);
    let mut lang = ConstraintLanguage::new(domain);
    let mut constraints = Vec::new();

    for u in 0..num_vars {
        for v in u + 1..num_vars {
            if !rng.chance(density) {
                continue;
            }
            let d = domain_size;
            let tuples: Vec<Vec<Label>> = match rng.below(3) {
                0 => {
                    let left = nonempty_subset(&mut rng, d);
                    let right = nonempty_subset(&mut rng, d);
                    left.iter()
                        .flat_map(|&a| right.iter().map(move |&b| vec![a, b]))
                        .collect()
                }
                1 => {
                    let left = nonempty_subset(&mut rng, d);
                    let right = nonempty_subset(&mut rng, d);
                    let apex_left = pick(&mut rng, &left);
                    let apex_right = pick(&mut rng, &right);
                    let mut tuples: Vec<Vec<Label>> =
                        right.iter().map(|&b| vec![apex_left, b]).collect();
                    tuples.extend(left.iter().map(|&a| vec![a, apex_right]));
                    tuples
                }
                _ => {
                    let size = 1 + rng.below(d);
                    let mut labels: Vec<Label> = (0..d).collect();
                    // Fisher-Yates for the source side, then again for targets.
                    for i in (1..d).rev() {
                        let j = rng.below(i + 1);
                        labels.swap(i, j);
                    }
                    let sources: BTreeSet<Label> = labels[..size].iter().copied().collect();
                    let mut targets: Vec<Label> = (0..d).collect();
                    for i in (1..d).rev() {
                        let j = rng.below(i + 1);
                        targets.swap(i, j);
                    }
                    sources
                        .iter()
                        .zip(targets.iter())
                        .map(|(&a, &b)| vec![a, b])
                        .collect()
                }
            };
            let name = format!("r{u}_{v}");
            lang.insert(name.clone(), Relation::new(domain, 2, tuples)?)?;
            constraints.push(Constraint {
                relation: name,
                scope: vec![u, v],
            });
        }
    }

    let mut costs = CostMatrix::new_zero(num_vars, domain_size);
    for v in 0..num_vars {
        for a in 0..domain_size {
            let value = rng.below(cost_max as usize + 1) as i64;
            costs.set(v, a, ExtendedCost::from_integer(value))?;
        }
    }
    let variables = (0..num_vars).map(|i| format!("x{i}")).collect();
    Instance::new(lang, variables, constraints, costs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimal::classify_01all;
    use crate::oracle::{solve_exact, ExactOutcome, DEFAULT_BUDGET};

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn wildcard_relation_tuples() {
        let rel = wildcard_neq_relation();
        assert_eq!(rel.len(), 7);
        assert!(rel.contains(&[0, 1]));
        assert!(rel.contains(&[2, 2]));
        assert!(!rel.contains(&[0, 0]));
    }

    #[test]
    fn cover_relation_counts() {
        assert_eq!(not_all_zero_relation(1).unwrap().tuples(), &[vec![1]]);
        assert_eq!(not_all_zero_relation(3).unwrap().len(), 7);
        for k in 1..=5 {
            let rel = not_all_zero_relation(k).unwrap();
            assert!(!rel.contains(&vec![0; k]));
            assert_eq!(rel.len(), (1 << k) - 1);
        }
    }

    #[test]
    fn linear_triple_counts_and_irreducibility() {
        let parity = linear_triple_relation(2, 1, 1, 1).unwrap();
        assert_eq!(parity.len(), 4);
        assert!(parity.contains(&[0, 0, 0]));
        let z3 = linear_triple_relation(3, 1, 1, 1).unwrap();
        assert_eq!(z3.len(), 9);
        assert!(z3.contains(&[0, 0, 0]));
        assert!(z3.is_irreducible());
        assert!(linear_triple_relation(4, 1, 1, 1).is_err());
        // Zero coefficients still give p^2 tuples as long as one is nonzero.
        assert_eq!(linear_triple_relation(3, 0, 0, 1).unwrap().len(), 9);
    }

    #[test]
    fn empty_graph_reduces_to_constraint_free_instance() {
        let g = WeightedGraph::new(3, vec![]).unwrap();
        let inst = min_uncut_to_csp(&g).unwrap();
        assert_eq!(inst.num_vars(), 3);
        assert!(inst.constraints.is_empty());
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(0));
    }

    #[test]
    fn single_edge_is_free_to_cut() {
        let g = WeightedGraph::new(2, vec![(0, 1, rat(1))]).unwrap();
        let inst = min_uncut_to_csp(&g).unwrap();
        assert_eq!(inst.num_vars(), 4);
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(0));
    }

    #[test]
    fn triangle_needs_one_uncut_edge() {
        let g = WeightedGraph::new(
            3,
            vec![(0, 1, rat(1)), (1, 2, rat(1)), (0, 2, rat(1))],
        )
        .unwrap();
        let inst = min_uncut_to_csp(&g).unwrap();
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(1));
    }

    #[test]
    fn self_loops_are_rejected() {
        assert!(matches!(
            WeightedGraph::new(2, vec![(1, 1, rat(1))]),
            Err(Error::SelfLoop { .. })
        ));
    }

    #[test]
    fn hypergraph_cover_basics() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]], vec![rat(1), rat(1), rat(1)]).unwrap();
        let inst = hypergraph_cover_to_csp(&h).unwrap();
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(1));

        // Disjoint edges: one vertex each.
        let h = Hypergraph::new(
            6,
            vec![vec![0, 1, 2], vec![3, 4, 5]],
            vec![rat(1); 6],
        )
        .unwrap();
        let inst = hypergraph_cover_to_csp(&h).unwrap();
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(2));

        assert!(matches!(
            Hypergraph::new(4, vec![vec![0, 1, 2], vec![0, 1]], vec![rat(1); 4])
                .and_then(|h| hypergraph_cover_to_csp(&h)),
            Err(Error::NonUniformHyperedge { .. })
        ));
    }

    #[test]
    fn fano_plane_cover_weight() {
        let lines = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        let h = Hypergraph::new(7, lines.clone(), vec![rat(1); 7]).unwrap();
        let inst = hypergraph_cover_to_csp(&h).unwrap();
        let ExactOutcome::Solved { optimum, witness } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        // Independent route: brute-force the minimum cover size directly.
        let mut best = 7;
        'mask: for mask in 0u32..(1 << 7) {
            for line in &lines {
                if line.iter().all(|&v| mask & (1 << v) == 0) {
                    continue 'mask;
                }
            }
            best = best.min(mask.count_ones() as usize);
        }
        assert_eq!(best, 3);
        assert_eq!(optimum, rat(best as i64));
        let chosen: Vec<usize> = witness
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == 1)
            .map(|(v, _)| v)
            .collect();
        assert_eq!(chosen.len(), 3);
    }

    #[test]
    fn nearest_codeword_examples() {
        // Zero matrix: the target itself is a codeword.
        let code = LinearCode::new(2, vec![vec![0, 0, 0]], vec![1, 0, 1]).unwrap();
        let inst = nearest_codeword_to_csp(&code).unwrap();
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(0));

        // Even-weight code, target (1,0,0): distance 1.
        let code = LinearCode::new(2, vec![vec![1, 1, 1]], vec![1, 0, 0]).unwrap();
        let inst = nearest_codeword_to_csp(&code).unwrap();
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(1));

        // Over F_3 the all-ones vector sums to zero.
        let code = LinearCode::new(3, vec![vec![1, 1, 1]], vec![1, 1, 1]).unwrap();
        let inst = nearest_codeword_to_csp(&code).unwrap();
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(0));
    }

    #[test]
    fn long_rows_split_into_triples() {
        // One row of five terms over F_2 forces two carry variables.
        let code = LinearCode::new(2, vec![vec![1; 5]], vec![0; 5]).unwrap();
        let inst = nearest_codeword_to_csp(&code).unwrap();
        assert_eq!(inst.num_vars(), 5 + 2);
        assert_eq!(inst.constraints.len(), 3);
        // Brute-force the Hamming distance as an independent check.
        let ExactOutcome::Solved { optimum, .. } = solve_exact(&inst, DEFAULT_BUDGET).unwrap()
        else {
            panic!("satisfiable");
        };
        assert_eq!(optimum, rat(0));
    }

    #[test]
    fn identity_gadget_keeps_instance_shape() {
        let or = crate::oracle::tests::or_instance();
        let mut gadgets = BTreeMap::new();
        gadgets.insert(
            "or".to_string(),
            PpGadget {
                arity: 2,
                aux_count: 0,
                body: vec![("or".to_string(), vec![GadgetVar::Head(0), GadgetVar::Head(1)])],
            },
        );
        let out = pp_apply(
            &or,
            &gadgets,
            &or.language,
            &LabelMap::identity(or.domain()),
        )
        .unwrap();
        assert_eq!(out.num_vars(), or.num_vars());
        assert_eq!(out.constraints, or.constraints);
        let a = solve_exact(&or, DEFAULT_BUDGET).unwrap();
        let b = solve_exact(&out, DEFAULT_BUDGET).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn auxiliary_variables_are_fresh_and_free() {
        // A gadget with two auxiliaries applied to three constraints.
        let d = Domain::new(2).unwrap();
        let mut lang = ConstraintLanguage::new(d);
        lang.insert("full", Relation::full(d, 2)).unwrap();
        let inst = Instance::new(
            lang.clone(),
            (0..3).map(|i| format!("x{i}")).collect(),
            (0..3)
                .map(|i| Constraint {
                    relation: "full".to_string(),
                    scope: vec![i, (i + 1) % 3],
                })
                .collect(),
            CostMatrix::new_zero(3, 2),
        )
        .unwrap();
        let mut gadgets = BTreeMap::new();
        gadgets.insert(
            "full".to_string(),
            PpGadget {
                arity: 2,
                aux_count: 2,
                body: vec![
                    ("full".to_string(), vec![GadgetVar::Head(0), GadgetVar::Aux(0)]),
                    ("full".to_string(), vec![GadgetVar::Aux(1), GadgetVar::Head(1)]),
                ],
            },
        );
        let out = pp_apply(&inst, &gadgets, &lang, &LabelMap::identity(d)).unwrap();
        assert_eq!(out.num_vars(), 3 + 6);
        for v in 3..9 {
            for a in 0..2 {
                assert_eq!(out.costs.get(v, a), &ExtendedCost::zero());
            }
        }
    }

    #[test]
    fn missing_gadget_and_missing_equality_error() {
        let or = crate::oracle::tests::or_instance();
        let err = pp_apply(
            &or,
            &BTreeMap::new(),
            &or.language,
            &LabelMap::identity(or.domain()),
        )
        .unwrap_err();
        assert_eq!(err, Error::MissingGadget("or".to_string()));

        let mut gadgets = BTreeMap::new();
        gadgets.insert(
            "or".to_string(),
            PpGadget {
                arity: 2,
                aux_count: 1,
                body: vec![("eq".to_string(), vec![GadgetVar::Head(0), GadgetVar::Aux(0)])],
            },
        );
        let err = pp_apply(
            &or,
            &gadgets,
            &or.language,
            &LabelMap::identity(or.domain()),
        )
        .unwrap_err();
        assert_eq!(err, Error::EqualityUnavailable);
    }

    #[test]
    fn permutation_language_classification() {
        let d = Domain::new(3).unwrap();
        let mut lang = ConstraintLanguage::new(d);
        for (i, sigma) in lex_permutations(3).enumerate() {
            lang.insert(format!("perm{i}"), permutation_relation(d, &sigma).unwrap())
                .unwrap();
        }
        assert_eq!(
            classify_permutation_language(&lang).unwrap(),
            Dichotomy::Approximable { ratio: 3 }
        );

        let mut hard = lang.clone();
        hard.insert("sum0", linear_triple_relation(3, 1, 1, 1).unwrap())
            .unwrap();
        assert_eq!(classify_permutation_language(&hard).unwrap(), Dichotomy::HardNoNu);

        let mut easy = lang.clone();
        easy.insert("all", Relation::full(d, 2)).unwrap();
        assert_eq!(
            classify_permutation_language(&easy).unwrap(),
            Dichotomy::Approximable { ratio: 3 }
        );

        let mut incomplete = ConstraintLanguage::new(d);
        incomplete
            .insert("perm0", permutation_relation(d, &[0, 1, 2]).unwrap())
            .unwrap();
        assert!(matches!(
            classify_permutation_language(&incomplete),
            Err(Error::MissingPermutation(_))
        ));
    }

    #[test]
    fn generator_is_deterministic_and_well_shaped() {
        let a = gen_random_01all(7, 3, 4, 1.0, 10).unwrap();
        let b = gen_random_01all(7, 3, 4, 1.0, 10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.constraints.len(), 6);
        let c = gen_random_01all(8, 3, 4, 0.0, 10).unwrap();
        assert!(c.constraints.is_empty());
        for (_, rel) in a.language.iter() {
            assert!(classify_01all(rel).unwrap().is_preserved());
        }
    }
}
